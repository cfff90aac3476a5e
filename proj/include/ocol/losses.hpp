#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ocol/composite.hpp"
#include "ocol/geometry.hpp"
#include "ocol/vec.hpp"

namespace ocol {

// Convex per-round cost. Three families:
//   linear           f(x) = <g, x>
//   scaled_quadratic f(x) = s * ||x - center||_2^2
//   pnorm_power      f(x) = s * (1/p) ||x||_2^p,  p >= 2
struct LossFunction {
    enum class Kind { linear, scaled_quadratic, pnorm_power };

    Kind kind = Kind::linear;
    Vector g;      // linear coefficient
    double s = 1.0;
    Vector center; // quadratic center
    int p = 2;

    static LossFunction Linear(Vector g);
    static LossFunction ScaledQuadratic(double s, Vector center);
    static LossFunction PnormPower(int p, double s);

    double value(const Vector& x) const;
    Vector subgradient(const Vector& x) const;
    LossFunction scaled(double factor) const;
    std::size_t dimension() const;
    std::string id() const;

    bool operator==(const LossFunction&) const = default;
};

double loss_value(const LossFunction& f, const Vector& x);
Vector loss_subgradient(const LossFunction& f, const Vector& x);

// Outcome of a sampling-based check of a relative constant. A failed
// certificate is a value, not an error.
struct RelativeCertificate {
    std::optional<double> L;
    std::optional<double> M;
    ReferenceFunction reference;
    int samples = 0;
    double max_violation = 0.0;
    bool valid = false;
};

// max over sampled (x,y) of <g, x-y> - L*sqrt(2 D_R(y,x)); valid iff <= 1e-7.
RelativeCertificate certify_relative_lipschitz(const LossFunction& f, const ReferenceFunction& R,
                                               double L, const DomainSpec& dom, int samples,
                                               std::uint64_t seed);

// max over sampled (x,y) of f(x) + <g, y-x> + M*D_R(y,x) - f(y); valid iff <= 1e-7.
RelativeCertificate certify_relative_strong_convexity(const LossFunction& f,
                                                      const ReferenceFunction& R, double M,
                                                      const DomainSpec& dom, int samples,
                                                      std::uint64_t seed);

// Adversary model: a deterministic function of (kind, seed, t).
struct LossStream {
    enum class Kind { fixed, iid_scaled, adversarial_linear, replay };

    Kind kind = Kind::fixed;
    LossFunction base;
    double scale_lo = 1.0, scale_hi = 1.0; // iid_scaled range
    std::uint64_t seed = 0;
    double bound = 1.0;   // adversarial_linear: |g_i| <= bound
    std::size_t dim = 1;  // adversarial_linear dimension
    std::vector<LossFunction> replay;
    long horizon = 0;

    static LossStream Fixed(LossFunction f, long horizon);
    static LossStream IidScaled(LossFunction base, double lo, double hi, std::uint64_t seed,
                                long horizon);
    static LossStream AdversarialLinear(std::uint64_t seed, double bound, std::size_t dim,
                                        long horizon);
    static LossStream Replay(std::vector<LossFunction> losses);

    LossFunction next(long t) const;
};

LossFunction stream_next(const LossStream& s, long t);

} // namespace ocol
