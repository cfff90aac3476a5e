#include "ocol/algorithms.hpp"

#include <cmath>

namespace ocol {

double StepSchedule::eta(long t) const {
    if (t < 1) throw ParamError("schedule_eta: t must be >= 1");
    switch (kind) {
        case Kind::sqrt_decay: {
            double num = numerator == Numerator::sqrt_K ? std::sqrt(K) : std::sqrt(2.0 * K);
            double off = offset == Offset::t ? 0.0 : 1.0;
            return num / (L * std::sqrt(static_cast<double>(t) + off));
        }
        case Kind::inverse_tM:
            return 1.0 / (static_cast<double>(t) * M);
        case Kind::constant:
            return eta_const;
    }
    return 0.0;
}

double StepSchedule::eta0() const {
    if (kind == Kind::sqrt_decay && offset == Offset::t_plus_1) {
        double num = numerator == Numerator::sqrt_K ? std::sqrt(K) : std::sqrt(2.0 * K);
        return num / L;
    }
    if (kind == Kind::constant) return eta_const;
    return 1.0;
}

double schedule_eta(const StepSchedule& s, long t) { return s.eta(t); }

FtrlState ftrl_init(const std::optional<ReferenceFunction>& R, const StepSchedule& schedule,
                    const DomainSpec& dom, const CompositeRegularizer& psi, bool linearized) {
    FtrlState st;
    st.R = R;
    st.schedule = schedule;
    st.dom = dom;
    st.psi = psi;
    st.linearized = linearized;
    st.g_sum.assign(dom.dimension(), 0.0);

    // x1 minimizes R alone over the domain; without a regularizer the argmin
    // is degenerate and the tie-break is the domain midpoint.
    SolveReport r = minimize_sum({}, CompositeRegularizer::Zero(), 0.0, R, 1.0, dom);
    st.x = r.minimizer;
    st.residual_sum = st.last_residual = r.residual;
    if (psi.value(st.x) > 1e-9)
        throw ValidationError("ftrl_init: Psi(x1) must vanish at the initial iterate");
    return st;
}

Vector ftrl_step(FtrlState& state, const LossFunction& f_t) {
    const long t = state.t;
    const double eta_t = state.schedule.eta(t);
    state.history.push_back(f_t);
    double weight = state.psi.is_zero() ? 0.0 : static_cast<double>(t);
    SolveReport r = minimize_sum(state.history, state.psi, weight, state.R,
                                 state.R ? 1.0 / eta_t : 0.0, state.dom);
    state.x = r.minimizer;
    state.last_residual = r.residual;
    state.residual_sum += r.residual;
    state.t = t + 1;
    return state.x;
}

Vector da_step(FtrlState& state, const Vector& g_t) {
    if (!state.R) throw ParamError("da_step: dual averaging needs a regularizer");
    const long t = state.t;
    const double eta_t = state.schedule.eta(t);
    axpy(state.g_sum, 1.0, g_t);
    SolveReport r = minimize_linear_plus_ref(state.g_sum, eta_t, *state.R, state.dom);
    state.x = r.minimizer;
    state.last_residual = r.residual;
    state.residual_sum += r.residual;
    state.t = t + 1;
    return state.x;
}

Vector rda_step(FtrlState& state, const Vector& g_t) {
    if (!state.R) throw ParamError("rda_step: needs a regularizer");
    const long t = state.t;
    const double eta_t = state.schedule.eta(t);
    axpy(state.g_sum, 1.0, g_t);
    std::vector<LossFunction> lin{LossFunction::Linear(state.g_sum)};
    SolveReport r = minimize_sum(lin, state.psi, static_cast<double>(t), state.R, 1.0 / eta_t,
                                 state.dom);
    state.x = r.minimizer;
    state.last_residual = r.residual;
    state.residual_sum += r.residual;
    state.t = t + 1;
    return state.x;
}

DsomdState dsomd_init(const ReferenceFunction& Phi, const StepSchedule& schedule,
                      const DomainSpec& dom, DsomdState::GammaMode gamma_mode,
                      const CompositeRegularizer& psi, const std::optional<Vector>& x0) {
    DsomdState st;
    st.Phi = Phi;
    st.schedule = schedule;
    st.dom = dom;
    st.gamma_mode = gamma_mode;
    st.psi = psi;
    st.composite = !psi.is_zero();
    if (x0) {
        if (!dom.contains(*x0)) throw ValidationError("dsomd_init: x0 outside domain");
        st.x = *x0;
    } else {
        st.x = minimize_sum({}, CompositeRegularizer::Zero(), 0.0, Phi, 1.0, dom).minimizer;
    }
    if (st.composite && psi.value(st.x) > 1e-9)
        throw ValidationError("dsomd_init: Psi(x1) must vanish at the initial iterate");
    st.xhat1 = Phi.gradient(st.x);
    return st;
}

double stabilization_gamma(const DsomdState& state, long t) {
    if (state.gamma_mode == DsomdState::GammaMode::one) return 1.0;
    double g = state.schedule.eta(t + 1) / state.schedule.eta(t);
    if (!(g > 0.0) || g > 1.0 + 1e-12)
        throw ParamError("stabilization_gamma: ratio requires a non-increasing schedule");
    return std::min(g, 1.0);
}

Vector dsomd_step(DsomdState& state, const Vector& g_t) {
    const long t = state.t;
    const double eta_t = state.schedule.eta(t);
    const double gamma = stabilization_gamma(state, t);

    Vector xhat = state.Phi.gradient(state.x);
    Vector what = xhat;
    axpy(what, -eta_t, g_t);
    state.last_what = what;
    state.last_w = grad_conjugate(state.Phi, what);

    Vector yhat(what.size());
    for (std::size_t i = 0; i < yhat.size(); ++i)
        yhat[i] = gamma * what[i] + (1.0 - gamma) * state.xhat1[i];
    state.last_yhat = yhat;
    state.last_y = grad_conjugate(state.Phi, yhat);
    state.last_gamma = gamma;

    ProjectionResult pr =
        state.composite
            ? composite_bregman_prox(state.Phi, state.last_y, state.psi,
                                     state.schedule.eta(t + 1), state.dom)
            : bregman_project(state.Phi, state.last_y, state.dom);
    state.x = pr.point;
    state.last_residual = pr.residual;
    state.residual_sum += pr.residual;
    state.t = t + 1;
    return state.x;
}

} // namespace ocol
