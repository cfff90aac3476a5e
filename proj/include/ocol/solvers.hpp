#pragma once

#include <map>
#include <optional>

#include "ocol/composite.hpp"
#include "ocol/geometry.hpp"
#include "ocol/losses.hpp"
#include "ocol/vec.hpp"

namespace ocol {

// Exact sufficient statistics of a sum of losses, so that cumulative
// objectives evaluate in O(1) regardless of the round count.
struct SumOfLosses {
    Vector gsum;
    bool has_linear = false;

    double qs = 0.0;   // sum of quadratic scales
    Vector qsc;        // sum of s_i * center_i
    double qscc = 0.0; // sum of s_i * ||center_i||^2
    bool has_quad = false;
    bool quad_centers_zero = true;

    std::map<int, double> pnorm; // p -> sum of scales

    std::size_t count = 0;

    void add(const LossFunction& f, std::size_t n);
    double value(const Vector& x) const;
    Vector subgradient(const Vector& x) const;

    bool empty() const { return count == 0; }
    bool all_linear() const { return !has_quad && pnorm.empty(); }
    // nondecreasing function of ||x||_2 alone
    bool radial() const { return !has_linear && quad_centers_zero; }
};

enum class SolveMethod { closed_form, bisection_1d, projected_subgradient };

struct SolveReport {
    Vector minimizer;
    double objective = 0.0;
    double residual = 0.0;
    SolveMethod method = SolveMethod::closed_form;
    int iterations = 0;
};

// argmin over dom of eta * <g_sum, x> + R(x). Conjugate-map closed form
// followed by a Bregman projection; optimality residual <= 1e-8.
SolveReport minimize_linear_plus_ref(const Vector& g_sum, double eta, const ReferenceFunction& R,
                                     const DomainSpec& dom);

// argmin over dom of  sum(objectives) + extra_weight * Psi + inv_eta * R.
// 1-D problems use derivative bisection (tolerance 1e-10); closed forms are
// used where the structure admits them; otherwise a projected first-order
// fallback with a 2000-iteration budget reports its residual.
SolveReport minimize_sum(const std::vector<LossFunction>& objectives,
                         const CompositeRegularizer& extra, double extra_weight,
                         const std::optional<ReferenceFunction>& R, double inv_eta,
                         const DomainSpec& dom);

// Hindsight comparator: best point of a per-axis grid over a bounded domain,
// refined by one local minimize_sum call. Psi enters once per round.
Vector comparator_argmin(const std::vector<LossFunction>& losses,
                         const CompositeRegularizer& extra, const DomainSpec& dom, int grid);

} // namespace ocol
