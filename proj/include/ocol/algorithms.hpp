#pragma once

#include <optional>

#include "ocol/composite.hpp"
#include "ocol/geometry.hpp"
#include "ocol/losses.hpp"
#include "ocol/solvers.hpp"
#include "ocol/vec.hpp"

namespace ocol {

// Positive non-increasing step-size sequences.
//
//   sqrt_decay : eta_t = num / (L * sqrt(t + off)),  num in {sqrt(K), sqrt(2K)},
//                off in {0, 1}
//   inverse_tM : eta_t = 1 / (t * M)
//   constant   : eta_t = eta
//
// eta0 is the round-zero value some ledgers reference: the formula value at
// t = 0 when finite, otherwise the conventional 1.
struct StepSchedule {
    enum class Kind { sqrt_decay, inverse_tM, constant };
    enum class Offset { t, t_plus_1 };
    enum class Numerator { sqrt_K, sqrt_2K };

    Kind kind = Kind::constant;
    double K = 1.0, L = 1.0, M = 1.0, eta_const = 1.0;
    Offset offset = Offset::t_plus_1;
    Numerator numerator = Numerator::sqrt_K;

    static StepSchedule SqrtDecay(double K, double L, Offset off = Offset::t_plus_1,
                                  Numerator num = Numerator::sqrt_K) {
        if (!(K > 0.0) || !(L > 0.0)) throw ParamError("sqrt_decay: K and L must be positive");
        StepSchedule s;
        s.kind = Kind::sqrt_decay;
        s.K = K;
        s.L = L;
        s.offset = off;
        s.numerator = num;
        return s;
    }

    static StepSchedule InverseTM(double M) {
        if (!(M > 0.0)) throw ParamError("inverse_tM: M must be positive");
        StepSchedule s;
        s.kind = Kind::inverse_tM;
        s.M = M;
        return s;
    }

    static StepSchedule Constant(double eta) {
        if (!(eta > 0.0)) throw ParamError("constant schedule: eta must be positive");
        StepSchedule s;
        s.kind = Kind::constant;
        s.eta_const = eta;
        return s;
    }

    double eta(long t) const;
    double eta0() const;

    bool operator==(const StepSchedule& o) const {
        return kind == o.kind && K == o.K && L == o.L && M == o.M && eta_const == o.eta_const &&
               offset == o.offset && numerator == o.numerator;
    }
};

double schedule_eta(const StepSchedule& s, long t);

// Follow-the-regularized-leader state. With R absent this is FTL; in
// linearized mode the history collapses to the running subgradient sum and
// the updates are dual averaging (plus Psi: regularized dual averaging).
struct FtrlState {
    long t = 1; // round index of the current iterate
    std::vector<LossFunction> history;
    Vector g_sum;
    bool linearized = false;
    std::optional<ReferenceFunction> R;
    StepSchedule schedule;
    DomainSpec dom;
    CompositeRegularizer psi;
    Vector x;
    double residual_sum = 0.0;
    double last_residual = 0.0;
};

FtrlState ftrl_init(const std::optional<ReferenceFunction>& R, const StepSchedule& schedule,
                    const DomainSpec& dom, const CompositeRegularizer& psi,
                    bool linearized = false);

// Consumes f_t, returns x_{t+1} = argmin over dom of F_t + t*Psi + (1/eta_t) R.
Vector ftrl_step(FtrlState& state, const LossFunction& f_t);

// Dual averaging: x_{t+1} = argmin over dom of eta_t <sum g_i, x> + R(x).
Vector da_step(FtrlState& state, const Vector& g_t);

// RDA keeps Psi un-linearized: argmin <sum g_i, x> + t*Psi(x) + (1/eta_t) R(x).
Vector rda_step(FtrlState& state, const Vector& g_t);

// Dual-stabilized online mirror descent.
struct DsomdState {
    enum class GammaMode { ratio, one };

    long t = 1;
    Vector x;
    Vector xhat1; // dual of the initial iterate
    ReferenceFunction Phi;
    StepSchedule schedule;
    DomainSpec dom;
    GammaMode gamma_mode = GammaMode::ratio;
    CompositeRegularizer psi;
    bool composite = false;

    // last step internals, recorded for the inequality ledgers
    Vector last_w, last_what, last_yhat, last_y;
    double last_gamma = 1.0;
    double residual_sum = 0.0;
    double last_residual = 0.0;
};

DsomdState dsomd_init(const ReferenceFunction& Phi, const StepSchedule& schedule,
                      const DomainSpec& dom, DsomdState::GammaMode gamma_mode,
                      const CompositeRegularizer& psi, const std::optional<Vector>& x0);

double stabilization_gamma(const DsomdState& state, long t);

// One round of Algorithm DS-OMD: dual step, stabilization mix, mirror back,
// Bregman projection (composite prox when Psi is present, weight eta_{t+1}).
Vector dsomd_step(DsomdState& state, const Vector& g_t);

} // namespace ocol
