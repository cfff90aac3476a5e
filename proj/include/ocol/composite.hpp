#pragma once

#include <limits>

#include "ocol/vec.hpp"

namespace ocol {

// The known extra regularizer Psi added to composite objectives. Nonnegative
// convex; the zero kind makes the plain setting a special case.
struct CompositeRegularizer {
    enum class Kind { zero, l1, indicator };

    Kind kind = Kind::zero;
    double lambda = 0.0; // l1 weight
    DomainSpec dom;      // indicator support

    static CompositeRegularizer Zero() { return {}; }

    static CompositeRegularizer L1(double lambda) {
        if (!(lambda >= 0.0)) throw ParamError("l1: lambda must be >= 0");
        CompositeRegularizer p;
        p.kind = Kind::l1;
        p.lambda = lambda;
        return p;
    }

    static CompositeRegularizer Indicator(DomainSpec d) {
        if (!d.bounded()) throw ParamError("indicator: support must be bounded");
        CompositeRegularizer p;
        p.kind = Kind::indicator;
        p.dom = std::move(d);
        return p;
    }

    bool is_zero() const { return kind == Kind::zero || (kind == Kind::l1 && lambda == 0.0); }

    double value(const Vector& x) const {
        switch (kind) {
            case Kind::zero:
                return 0.0;
            case Kind::l1:
                return lambda * norm1(x);
            case Kind::indicator:
                return dom.contains(x) ? 0.0 : std::numeric_limits<double>::infinity();
        }
        return 0.0;
    }
};

inline double soft_threshold(double v, double tau) {
    if (v > tau) return v - tau;
    if (v < -tau) return v + tau;
    return 0.0;
}

} // namespace ocol
