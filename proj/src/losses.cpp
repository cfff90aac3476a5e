#include "ocol/losses.hpp"

#include <cmath>

namespace ocol {

LossFunction LossFunction::Linear(Vector g) {
    if (!all_finite(g)) throw ParamError("linear loss: non-finite coefficient");
    LossFunction f;
    f.kind = Kind::linear;
    f.g = std::move(g);
    return f;
}

LossFunction LossFunction::ScaledQuadratic(double s, Vector center) {
    if (!(s >= 0.0) || !all_finite(center))
        throw ParamError("scaled_quadratic: needs s >= 0 and finite center");
    LossFunction f;
    f.kind = Kind::scaled_quadratic;
    f.s = s;
    f.center = std::move(center);
    return f;
}

LossFunction LossFunction::PnormPower(int p, double s) {
    if (p < 2) throw ParamError("pnorm_power: p must be >= 2");
    if (!(s >= 0.0)) throw ParamError("pnorm_power: s must be >= 0");
    LossFunction f;
    f.kind = Kind::pnorm_power;
    f.p = p;
    f.s = s;
    return f;
}

double LossFunction::value(const Vector& x) const {
    if (!all_finite(x)) throw ParamError("loss_value: non-finite input");
    switch (kind) {
        case Kind::linear:
            return dot(g, x);
        case Kind::scaled_quadratic:
            return s * norm2sq(sub(x, center));
        case Kind::pnorm_power:
            return s / p * std::pow(norm2sq(x), p / 2.0);
    }
    return 0.0;
}

Vector LossFunction::subgradient(const Vector& x) const {
    if (!all_finite(x)) throw ParamError("loss_subgradient: non-finite input");
    switch (kind) {
        case Kind::linear:
            return g;
        case Kind::scaled_quadratic:
            return ocol::scaled(sub(x, center), 2.0 * s);
        case Kind::pnorm_power: {
            double n2 = norm2sq(x);
            if (n2 == 0.0) return Vector(x.size(), 0.0); // 0 is a valid subgradient at the minimizer
            return ocol::scaled(x, s * std::pow(n2, (p - 2) / 2.0));
        }
    }
    return {};
}

LossFunction LossFunction::scaled(double factor) const {
    LossFunction f(*this);
    switch (kind) {
        case Kind::linear:
            for (double& v : f.g) v *= factor;
            break;
        case Kind::scaled_quadratic:
        case Kind::pnorm_power:
            f.s *= factor;
            break;
    }
    return f;
}

std::size_t LossFunction::dimension() const {
    switch (kind) {
        case Kind::linear:
            return g.size();
        case Kind::scaled_quadratic:
            return center.size();
        case Kind::pnorm_power:
            return 0; // any
    }
    return 0;
}

std::string LossFunction::id() const {
    switch (kind) {
        case Kind::linear:
            return "linear";
        case Kind::scaled_quadratic:
            return "scaled_quadratic";
        case Kind::pnorm_power:
            return "pnorm_power";
    }
    return "?";
}

double loss_value(const LossFunction& f, const Vector& x) { return f.value(x); }
Vector loss_subgradient(const LossFunction& f, const Vector& x) { return f.subgradient(x); }

RelativeCertificate certify_relative_lipschitz(const LossFunction& f, const ReferenceFunction& R,
                                               double L, const DomainSpec& dom, int samples,
                                               std::uint64_t seed) {
    if (samples < 1) throw ParamError("certify: samples must be >= 1");
    Rng rng(seed);
    double worst = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < samples; ++k) {
        Vector x = dom.sample(rng);
        Vector y = dom.sample(rng);
        Vector g = f.subgradient(x);
        double d = bregman_divergence(R, y, x);
        double viol = dot(g, sub(x, y)) - L * std::sqrt(std::max(2.0 * d, 0.0));
        worst = std::max(worst, viol);
    }
    RelativeCertificate c;
    c.L = L;
    c.reference = R;
    c.samples = samples;
    c.max_violation = worst;
    c.valid = worst <= 1e-7;
    return c;
}

RelativeCertificate certify_relative_strong_convexity(const LossFunction& f,
                                                      const ReferenceFunction& R, double M,
                                                      const DomainSpec& dom, int samples,
                                                      std::uint64_t seed) {
    if (samples < 1) throw ParamError("certify: samples must be >= 1");
    Rng rng(seed);
    double worst = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < samples; ++k) {
        Vector x = dom.sample(rng);
        Vector y = dom.sample(rng);
        Vector g = f.subgradient(x);
        double d = bregman_divergence(R, y, x);
        double viol = f.value(x) + dot(g, sub(y, x)) + M * d - f.value(y);
        worst = std::max(worst, viol);
    }
    RelativeCertificate c;
    c.M = M;
    c.reference = R;
    c.samples = samples;
    c.max_violation = worst;
    c.valid = worst <= 1e-7;
    return c;
}

LossStream LossStream::Fixed(LossFunction f, long horizon) {
    LossStream s;
    s.kind = Kind::fixed;
    s.base = std::move(f);
    s.horizon = horizon;
    return s;
}

LossStream LossStream::IidScaled(LossFunction base, double lo, double hi, std::uint64_t seed,
                                 long horizon) {
    if (!(lo <= hi) || !(lo >= 0.0)) throw ParamError("iid_scaled: needs 0 <= lo <= hi");
    LossStream s;
    s.kind = Kind::iid_scaled;
    s.base = std::move(base);
    s.scale_lo = lo;
    s.scale_hi = hi;
    s.seed = seed;
    s.horizon = horizon;
    return s;
}

LossStream LossStream::AdversarialLinear(std::uint64_t seed, double bound, std::size_t dim,
                                         long horizon) {
    if (!(bound > 0.0)) throw ParamError("adversarial_linear: bound must be positive");
    LossStream s;
    s.kind = Kind::adversarial_linear;
    s.seed = seed;
    s.bound = bound;
    s.dim = dim;
    s.horizon = horizon;
    return s;
}

LossStream LossStream::Replay(std::vector<LossFunction> losses) {
    LossStream s;
    s.kind = Kind::replay;
    s.horizon = static_cast<long>(losses.size());
    s.replay = std::move(losses);
    return s;
}

LossFunction LossStream::next(long t) const {
    if (t < 1 || t > horizon) throw HorizonExceeded("stream_next: round outside horizon");
    switch (kind) {
        case Kind::fixed:
            return base;
        case Kind::iid_scaled: {
            Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
            return base.scaled(rng.uniform(scale_lo, scale_hi));
        }
        case Kind::adversarial_linear: {
            Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
            Vector g(dim);
            for (double& v : g) v = rng.uniform(-bound, bound);
            return LossFunction::Linear(std::move(g));
        }
        case Kind::replay:
            return replay[static_cast<std::size_t>(t - 1)];
    }
    throw ParamError("stream_next: unknown kind");
}

LossFunction stream_next(const LossStream& s, long t) { return s.next(t); }

} // namespace ocol
