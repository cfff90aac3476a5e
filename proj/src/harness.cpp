#include "ocol/harness.hpp"

#include <cmath>

#include "ocol/solvers.hpp"

namespace ocol {

std::string algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::ftrl: return "ftrl";
        case Algorithm::ftl: return "ftl";
        case Algorithm::da: return "da";
        case Algorithm::rda: return "rda";
        case Algorithm::dsomd: return "dsomd";
        case Algorithm::dsomd_composite: return "dsomd_composite";
        case Algorithm::omd_vanilla: return "omd_vanilla";
    }
    return "?";
}

std::optional<Algorithm> algorithm_from_name(const std::string& name) {
    for (Algorithm a : {Algorithm::ftrl, Algorithm::ftl, Algorithm::da, Algorithm::rda,
                        Algorithm::dsomd, Algorithm::dsomd_composite, Algorithm::omd_vanilla})
        if (algorithm_name(a) == name) return a;
    return std::nullopt;
}

std::string bound_kind_name(BoundKind k) {
    switch (k) {
        case BoundKind::ftrl_sqrt: return "ftrl_sqrt";
        case BoundKind::ftl_log: return "ftl_log";
        case BoundKind::dsomd_sqrt: return "dsomd_sqrt";
        case BoundKind::omd_log: return "omd_log";
        case BoundKind::composite_ftrl: return "composite_ftrl";
        case BoundKind::composite_dsomd: return "composite_dsomd";
    }
    return "?";
}

std::optional<BoundKind> bound_kind_from_name(const std::string& name) {
    for (BoundKind k : {BoundKind::ftrl_sqrt, BoundKind::ftl_log, BoundKind::dsomd_sqrt,
                        BoundKind::omd_log, BoundKind::composite_ftrl,
                        BoundKind::composite_dsomd})
        if (bound_kind_name(k) == name) return k;
    return std::nullopt;
}

RunTrace run_game(const GameConfig& cfg, const LossStream& stream, long T) {
    RunTrace trace;
    trace.cfg = cfg;
    const bool is_dsomd = cfg.algo == Algorithm::dsomd || cfg.algo == Algorithm::dsomd_composite ||
                          cfg.algo == Algorithm::omd_vanilla;
    try {
        FtrlState ftrl;
        DsomdState omd;
        if (is_dsomd) {
            if (!cfg.R) throw ParamError("run_game: mirror descent needs a mirror map");
            auto gm = cfg.algo == Algorithm::omd_vanilla ? DsomdState::GammaMode::one
                                                         : cfg.gamma_mode;
            omd = dsomd_init(*cfg.R, cfg.schedule, cfg.dom, gm,
                             cfg.algo == Algorithm::dsomd_composite ? cfg.psi
                                                                    : CompositeRegularizer::Zero(),
                             cfg.x0);
            trace.x1 = omd.x;
        } else {
            bool linearized = cfg.algo == Algorithm::da || cfg.algo == Algorithm::rda;
            ftrl = ftrl_init(cfg.algo == Algorithm::ftl ? std::nullopt : cfg.R, cfg.schedule,
                             cfg.dom, cfg.psi, linearized);
            trace.x1 = ftrl.x;
        }
        trace.iterates.push_back(trace.x1);

        for (long t = 1; t <= T; ++t) {
            LossFunction f = stream.next(t);
            RoundRecord rec;
            rec.t = t;
            rec.x = is_dsomd ? omd.x : ftrl.x;
            rec.f = f;
            rec.fx = f.value(rec.x);
            rec.g = f.subgradient(rec.x);
            rec.eta = cfg.schedule.eta(t);
            rec.psi_x = cfg.psi.value(rec.x);

            Vector next;
            if (is_dsomd) {
                next = dsomd_step(omd, rec.g);
                rec.gamma = omd.last_gamma;
                rec.w = omd.last_w;
                rec.d_x_w = bregman_divergence(*cfg.R, rec.x, rec.w);
                rec.solver_residual = omd.last_residual;
            } else {
                switch (cfg.algo) {
                    case Algorithm::ftrl:
                    case Algorithm::ftl:
                        next = ftrl_step(ftrl, f);
                        break;
                    case Algorithm::da:
                        next = da_step(ftrl, rec.g);
                        break;
                    case Algorithm::rda:
                        next = rda_step(ftrl, rec.g);
                        break;
                    default:
                        break;
                }
                rec.gamma = 1.0;
                rec.solver_residual = ftrl.last_residual;
            }
            if (!all_finite(next))
                throw ConvergenceError("run_game: non-finite iterate at round " +
                                       std::to_string(t));
            trace.residual_sum += rec.solver_residual;
            trace.rounds.push_back(std::move(rec));
            trace.iterates.push_back(next);
        }
    } catch (const std::exception& e) {
        trace.failed = true;
        trace.error = e.what();
    }
    return trace;
}

double regret(const RunTrace& trace, const Vector& z) {
    double player = 0.0, comparator = 0.0;
    for (const auto& r : trace.rounds) {
        player += r.fx;
        comparator += r.f.value(z);
    }
    return player - comparator;
}

double composite_regret(const RunTrace& trace, const Vector& z,
                        const CompositeRegularizer& psi) {
    double psi_z = psi.value(z);
    double extra = 0.0;
    for (const auto& r : trace.rounds) extra += psi.value(r.x) - psi_z;
    return regret(trace, z) + extra;
}

BoundForms theoretical_bound(BoundKind kind, const BoundParams& p) {
    return {theoretical_bound_partial(kind, p, p.T),
            [&]() -> std::optional<double> {
                switch (kind) {
                    case BoundKind::ftrl_sqrt:
                    case BoundKind::dsomd_sqrt:
                    case BoundKind::composite_ftrl:
                    case BoundKind::composite_dsomd:
                        return 2.0 * p.L * std::sqrt(std::max(p.K, 0.0) * (p.T + 1));
                    case BoundKind::ftl_log:
                    case BoundKind::omd_log:
                        return std::nullopt;
                }
                return std::nullopt;
            }()};
}

double theoretical_bound_partial(BoundKind kind, const BoundParams& p, long t) {
    if (t < 1) throw ParamError("theoretical_bound: t must be >= 1");
    const double L2 = p.L * p.L;
    switch (kind) {
        case BoundKind::ftl_log:
        case BoundKind::omd_log:
            if (!(p.M > 0.0)) throw ParamError("theoretical_bound: log bound needs M > 0");
            return L2 / (2.0 * p.M) * (std::log(static_cast<double>(t)) + 1.0);
        case BoundKind::ftrl_sqrt:
        case BoundKind::composite_ftrl: {
            double s = 0.0;
            for (long i = 1; i <= t; ++i)
                s += L2 * (i == 1 ? p.schedule.eta0() : p.schedule.eta(i - 1)) / 2.0;
            double kterm = kind == BoundKind::ftrl_sqrt ? p.K : 2.0 * p.K;
            return kterm / p.schedule.eta(t) + s;
        }
        case BoundKind::dsomd_sqrt:
        case BoundKind::composite_dsomd: {
            double s = 0.0;
            for (long i = 1; i <= t; ++i) s += p.schedule.eta(i) * L2 / 2.0;
            return p.K / p.schedule.eta(t + 1) + s;
        }
    }
    return 0.0;
}

namespace {

double realized_comparator_k(const RunTrace& trace, const Vector& z) {
    if (!trace.cfg.R) return 0.0;
    if (trace.ftrl_family())
        return trace.cfg.R->value(z) - trace.cfg.R->value(trace.x1);
    return bregman_divergence(*trace.cfg.R, z, trace.x1);
}

} // namespace

BoundReport evaluate_bound(BoundKind kind, const RunTrace& trace, const Vector& z, double L,
                           std::optional<double> M, std::optional<double> K) {
    BoundReport rep;
    rep.kind = kind;
    rep.L = L;
    rep.M = M.value_or(0.0);
    rep.K_realized = realized_comparator_k(trace, z);
    rep.K_used = K.value_or(rep.K_realized);
    rep.k_valid = rep.K_used >= rep.K_realized - 1e-9;

    BoundParams p;
    p.K = rep.K_used;
    p.L = L;
    p.M = rep.M;
    p.T = trace.horizon();
    p.schedule = trace.cfg.schedule;
    BoundForms forms = theoretical_bound(kind, p);
    rep.bound_value = forms.schedule_form;
    rep.closed_form = forms.closed_form;

    bool composite = kind == BoundKind::composite_ftrl || kind == BoundKind::composite_dsomd;
    rep.realized = composite ? composite_regret(trace, z, trace.cfg.psi) : regret(trace, z);
    rep.tolerance = trace.residual_sum + 1e-6;
    rep.slack = rep.bound_value - rep.realized;
    rep.satisfied = rep.k_valid && rep.realized <= rep.bound_value + rep.tolerance;
    return rep;
}

LedgerReport strong_ftrl_ledger(const RunTrace& trace, const Vector& z) {
    if (!trace.ftrl_family())
        throw ParamError("strong_ftrl_ledger: needs an FTRL-family trace");
    const long T = trace.horizon();
    const auto& sched = trace.cfg.schedule;
    const bool composite = !trace.cfg.psi.is_zero();
    const std::size_t n = trace.cfg.dom.dimension();

    LedgerReport rep;

    // regret of the functions the reduction actually optimizes
    double player = 0.0, comp = 0.0;
    for (long t = 0; t < T; ++t) {
        LossFunction f = trace.effective_loss(t);
        player += f.value(trace.rounds[t].x);
        comp += f.value(z);
        if (composite) {
            player += trace.cfg.psi.value(trace.rounds[t].x);
            comp += trace.cfg.psi.value(z);
        }
    }
    rep.realized = player - comp;

    // sum_{t=0..T} (1/eta_t - 1/eta_{t-1}) (R(z) - R(x_t)), x_0 = x_1, 1/eta_{-1} = 0
    double r_sum = 0.0;
    if (trace.cfg.R) {
        const auto& R = *trace.cfg.R;
        double rz = R.value(z);
        double inv_prev = 0.0;
        for (long t = 0; t <= T; ++t) {
            double inv = 1.0 / (t == 0 ? sched.eta0() : sched.eta(t));
            const Vector& xt = t == 0 ? trace.x1 : trace.rounds[t - 1].x;
            r_sum += (inv - inv_prev) * (rz - R.value(xt));
            inv_prev = inv;
        }
    }

    // sum_t H_t(x_t) - H_t(x_{t+1}) with H_t = F_t + t*Psi + (1/eta_t) R
    SumOfLosses F;
    double q_sum = 0.0;
    rep.per_round.reserve(T);
    for (long t = 1; t <= T; ++t) {
        F.add(trace.effective_loss(t - 1), n);
        const Vector& xt = trace.rounds[t - 1].x;
        const Vector& xn = trace.iterates[static_cast<std::size_t>(t)];
        auto H = [&](const Vector& v) {
            double h = F.value(v);
            if (composite) h += static_cast<double>(t) * trace.cfg.psi.value(v);
            if (trace.cfg.R) h += 1.0 / sched.eta(t) * trace.cfg.R->value(v);
            return h;
        };
        double q = H(xt) - H(xn);
        rep.per_round.push_back(q);
        q_sum += q;
    }

    rep.rhs = r_sum + q_sum;
    rep.tolerance = trace.residual_sum + 1e-6;
    rep.slack = rep.rhs - rep.realized;
    rep.max_per_round_violation = rep.realized - rep.rhs;
    rep.holds = rep.realized <= rep.rhs + rep.tolerance;
    return rep;
}

LedgerReport dsomd_ledger(const RunTrace& trace, const Vector& z, double L) {
    if (trace.ftrl_family()) throw ParamError("dsomd_ledger: needs a mirror-descent trace");
    const long T = trace.horizon();
    const auto& R = *trace.cfg.R;
    const bool composite = trace.cfg.algo == Algorithm::dsomd_composite;

    LedgerReport rep;
    rep.per_round.reserve(T);
    double viol_max = -std::numeric_limits<double>::infinity();
    double d_over_eta = 0.0;
    for (const auto& r : trace.rounds) {
        double viol = r.d_x_w - r.eta * r.eta * L * L / 2.0;
        rep.per_round.push_back(viol);
        viol_max = std::max(viol_max, viol);
        d_over_eta += r.d_x_w / r.eta;
    }
    rep.max_per_round_violation = viol_max;

    rep.realized = composite ? composite_regret(trace, z, trace.cfg.psi) : regret(trace, z);
    rep.tolerance = trace.residual_sum + 1e-6;

    bool ratio_mode = trace.cfg.algo != Algorithm::omd_vanilla &&
                      trace.cfg.gamma_mode == DsomdState::GammaMode::ratio;
    if (ratio_mode) {
        rep.rhs = d_over_eta + bregman_divergence(R, z, trace.x1) / trace.cfg.schedule.eta(T + 1);
        rep.holds = rep.realized <= rep.rhs + rep.tolerance;
    } else if (trace.cfg.schedule.kind == StepSchedule::Kind::inverse_tM) {
        // with gamma = 1 and eta_t = 1/(tM) the comparator terms telescope away
        rep.rhs = d_over_eta;
        rep.holds = rep.realized <= rep.rhs + rep.tolerance;
    } else {
        rep.rhs = d_over_eta;
        rep.aggregate_checked = false;
        rep.holds = true;
    }
    rep.slack = rep.rhs - rep.realized;
    return rep;
}

LemmaA1Result lemma_a1_check(const std::vector<double>& a) {
    if (a.empty() || !(a[0] > 0.0))
        throw ParamError("lemma_a1_check: needs a nonnegative sequence with a_1 > 0");
    double partial = 0.0, lhs = 0.0;
    for (double v : a) {
        if (v < 0.0) throw ParamError("lemma_a1_check: negative entry");
        partial += v;
        lhs += v / std::sqrt(partial);
    }
    double rhs = 2.0 * std::sqrt(partial);
    return {lhs, rhs, lhs <= rhs + 1e-12};
}

} // namespace ocol
