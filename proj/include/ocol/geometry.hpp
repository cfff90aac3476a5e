#pragma once

#include <optional>

#include "ocol/composite.hpp"
#include "ocol/vec.hpp"

namespace ocol {

// Coordinates below this floor are lifted before logs so that the entropy
// gradient stays finite on the simplex boundary.
constexpr double kEntropyFloor = 1e-12;

// Convex reference function used as FTRL regularizer or OMD mirror map.
//
//   squared_l2 : (1/2)||x||_2^2                     on R^n
//   poly_norm  : scale * (1/(2p)) ||x||_2^(2p)      on R^n, p >= 2
//   neg_entropy: sum_i x_i ln x_i                   on the nonnegative orthant
//
// poly_norm carries an explicit scale so that e.g. the 1-D function 2x^4 is
// representable as p=2, scale=8.
struct ReferenceFunction {
    enum class Kind { squared_l2, poly_norm, neg_entropy };

    Kind kind = Kind::squared_l2;
    int p = 2;
    double scale = 1.0;

    static ReferenceFunction SquaredL2() { return {}; }

    static ReferenceFunction PolyNorm(int p, double scale = 1.0) {
        if (p < 2) throw ParamError("poly_norm: p must be >= 2");
        if (!(scale > 0.0)) throw ParamError("poly_norm: scale must be positive");
        ReferenceFunction r;
        r.kind = Kind::poly_norm;
        r.p = p;
        r.scale = scale;
        return r;
    }

    static ReferenceFunction NegEntropy() {
        ReferenceFunction r;
        r.kind = Kind::neg_entropy;
        return r;
    }

    double value(const Vector& x) const;
    Vector gradient(const Vector& x) const;

    bool operator==(const ReferenceFunction& o) const {
        return kind == o.kind && (kind != Kind::poly_norm || (p == o.p && scale == o.scale));
    }
};

double ref_value(const ReferenceFunction& R, const Vector& x);
Vector ref_gradient(const ReferenceFunction& R, const Vector& x);

// D_R(x, y) = R(x) - R(y) - <grad R(y), x - y>, always evaluated from the
// definition rather than a per-kind shortcut.
double bregman_divergence(const ReferenceFunction& R, const Vector& x, const Vector& y);

// Inverse gradient map: the unique interior x with grad Phi(x) = g_hat.
Vector grad_conjugate(const ReferenceFunction& Phi, const Vector& g_hat);

// |D_R(x,y) + D_R(z,x) - D_R(z,y) - <grad R(x) - grad R(y), x - z>|
double three_point_residual(const ReferenceFunction& R, const Vector& z, const Vector& x,
                            const Vector& y);

struct ProjectionResult {
    Vector point;
    double residual = 0.0;
    int iterations = 0;
};

// argmin_{x in dom} D_Phi(x, y). Closed forms where they exist; otherwise an
// inner solver with residual tolerance 1e-10 and a 200-iteration budget.
ProjectionResult bregman_project(const ReferenceFunction& Phi, const Vector& y,
                                 const DomainSpec& dom);

// argmin_x D_Phi(x, y) + weight * Psi(x) over dom. With weight = 0 this is
// bregman_project; an indicator Psi carries the constraint set itself.
ProjectionResult composite_bregman_prox(const ReferenceFunction& Phi, const Vector& y,
                                        const CompositeRegularizer& Psi, double weight,
                                        const DomainSpec& dom);

} // namespace ocol
