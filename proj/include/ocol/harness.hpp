#pragma once

#include <optional>
#include <string>

#include "ocol/algorithms.hpp"
#include "ocol/losses.hpp"

namespace ocol {

enum class Algorithm { ftrl, ftl, da, rda, dsomd, dsomd_composite, omd_vanilla };

std::string algorithm_name(Algorithm a);
std::optional<Algorithm> algorithm_from_name(const std::string& name);

// Everything the game loop needs besides the loss stream.
struct GameConfig {
    Algorithm algo = Algorithm::ftrl;
    std::optional<ReferenceFunction> R; // regularizer / mirror map
    DomainSpec dom;
    StepSchedule schedule;
    DsomdState::GammaMode gamma_mode = DsomdState::GammaMode::ratio;
    CompositeRegularizer psi;
    std::optional<Vector> x0;
};

struct RoundRecord {
    long t = 0;
    Vector x;       // iterate the cost was charged at
    LossFunction f; // the observed loss
    double fx = 0.0;
    Vector g; // subgradient at x
    double eta = 0.0;
    double gamma = 1.0; // 1 for the FTRL family
    double psi_x = 0.0;
    double d_x_w = 0.0; // DS-OMD: D_Phi(x_t, w_{t+1})
    Vector w;           // DS-OMD: w_{t+1}
    double solver_residual = 0.0;
};

struct RunTrace {
    GameConfig cfg;
    std::vector<RoundRecord> rounds;
    Vector x1;
    std::vector<Vector> iterates; // x_1 .. x_{T+1}
    bool failed = false;
    std::string error;
    double residual_sum = 0.0;

    long horizon() const { return static_cast<long>(rounds.size()); }
    bool ftrl_family() const {
        return cfg.algo == Algorithm::ftrl || cfg.algo == Algorithm::ftl ||
               cfg.algo == Algorithm::da || cfg.algo == Algorithm::rda;
    }
    // the loss the FTRL reduction actually optimizes (linearized for DA/RDA)
    LossFunction effective_loss(std::size_t i) const {
        if (cfg.algo == Algorithm::da || cfg.algo == Algorithm::rda)
            return LossFunction::Linear(rounds[i].g);
        return rounds[i].f;
    }
};

// Plays the OCO protocol for T rounds. Deterministic given the stream seeds;
// solver or geometry failures abort the run with the partial trace attached.
RunTrace run_game(const GameConfig& cfg, const LossStream& stream, long T);

// sum_t f_t(x_t) - sum_t f_t(z)
double regret(const RunTrace& trace, const Vector& z);

// adds Psi on both sides
double composite_regret(const RunTrace& trace, const Vector& z,
                        const CompositeRegularizer& psi);

enum class BoundKind { ftrl_sqrt, ftl_log, dsomd_sqrt, omd_log, composite_ftrl, composite_dsomd };

std::string bound_kind_name(BoundKind k);
std::optional<BoundKind> bound_kind_from_name(const std::string& name);

struct BoundParams {
    double K = 0.0;
    double L = 0.0;
    double M = 0.0;
    long T = 0;
    StepSchedule schedule;
};

struct BoundForms {
    double schedule_form = 0.0;
    std::optional<double> closed_form;
};

// Schedule-form and closed-form values of the six theorem bounds. The
// schedule form is the reported value (tighter bookkeeping).
BoundForms theoretical_bound(BoundKind kind, const BoundParams& params);

// Running schedule-form value at horizon t (monotone in t by construction).
double theoretical_bound_partial(BoundKind kind, const BoundParams& params, long t);

struct BoundReport {
    BoundKind kind = BoundKind::ftrl_sqrt;
    double bound_value = 0.0; // schedule form
    std::optional<double> closed_form;
    double realized = 0.0;
    double slack = 0.0;
    double tolerance = 0.0;
    double K_used = 0.0;
    double K_realized = 0.0;
    bool k_valid = true;
    bool satisfied = false;
    double L = 0.0, M = 0.0;
};

// Evaluates one theorem bound against a finished run. K defaults to the
// realized comparator value (R(z) - R(x1) or D_Phi(z, x1)); a caller-pinned K
// is validated against the realized one.
BoundReport evaluate_bound(BoundKind kind, const RunTrace& trace, const Vector& z, double L,
                           std::optional<double> M, std::optional<double> K);

struct LedgerReport {
    double realized = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    double tolerance = 0.0;
    bool holds = false;
    double max_per_round_violation = 0.0;
    bool aggregate_checked = true;
    std::vector<double> per_round; // per-round ledger quantity
};

// Both sides of the per-round regret decomposition for FTRL-family runs:
// realized regret vs. the regularizer-difference sum plus the consecutive
// iterate quality gaps H_t(x_t) - H_t(x_{t+1}). per_round holds the gaps.
LedgerReport strong_ftrl_ledger(const RunTrace& trace, const Vector& z);

// DS-OMD: per-round check D_Phi(x_t, w_{t+1}) <= eta_t^2 L^2 / 2 + 1e-7 and
// the aggregate dual-stabilized regret inequality. per_round holds the
// per-round violations.
LedgerReport dsomd_ledger(const RunTrace& trace, const Vector& z, double L);

struct LemmaA1Result {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

// sum_t a_t / sqrt(sum_{i<=t} a_i) <= 2 sqrt(sum_t a_t) for nonnegative a, a_1 > 0.
LemmaA1Result lemma_a1_check(const std::vector<double>& a);

} // namespace ocol
