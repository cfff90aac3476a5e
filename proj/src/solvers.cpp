#include "ocol/solvers.hpp"

#include <algorithm>
#include <cmath>

namespace ocol {

void SumOfLosses::add(const LossFunction& f, std::size_t n) {
    switch (f.kind) {
        case LossFunction::Kind::linear:
            if (gsum.empty()) gsum.assign(n, 0.0);
            axpy(gsum, 1.0, f.g);
            has_linear = true;
            break;
        case LossFunction::Kind::scaled_quadratic:
            if (qsc.empty()) qsc.assign(n, 0.0);
            qs += f.s;
            axpy(qsc, f.s, f.center);
            qscc += f.s * norm2sq(f.center);
            has_quad = true;
            if (norm2sq(f.center) != 0.0) quad_centers_zero = false;
            break;
        case LossFunction::Kind::pnorm_power:
            pnorm[f.p] += f.s;
            break;
    }
    ++count;
}

double SumOfLosses::value(const Vector& x) const {
    double v = 0.0;
    if (has_linear) v += dot(gsum, x);
    if (has_quad) v += qs * norm2sq(x) - 2.0 * dot(qsc, x) + qscc;
    if (!pnorm.empty()) {
        double n2 = norm2sq(x);
        for (const auto& [p, s] : pnorm) v += s / p * std::pow(n2, p / 2.0);
    }
    return v;
}

Vector SumOfLosses::subgradient(const Vector& x) const {
    Vector g(x.size(), 0.0);
    if (has_linear) axpy(g, 1.0, gsum);
    if (has_quad) {
        axpy(g, 2.0 * qs, x);
        axpy(g, -2.0, qsc);
    }
    if (!pnorm.empty()) {
        double n2 = norm2sq(x);
        if (n2 != 0.0)
            for (const auto& [p, s] : pnorm) axpy(g, s * std::pow(n2, (p - 2) / 2.0), x);
    }
    return g;
}

namespace {

struct Problem {
    SumOfLosses agg;
    double l1 = 0.0; // total l1 weight (extra_weight * lambda)
    std::optional<ReferenceFunction> R;
    double inv_eta = 0.0;
    DomainSpec dom;

    double value(const Vector& x) const {
        double v = agg.value(x);
        if (l1 > 0.0) v += l1 * norm1(x);
        if (R && inv_eta > 0.0) v += inv_eta * R->value(x);
        return v;
    }

    Vector smooth_grad(const Vector& x) const {
        Vector g = agg.subgradient(x);
        if (R && inv_eta > 0.0) axpy(g, inv_eta, R->gradient(x));
        return g;
    }

    bool has_ref() const { return R.has_value() && inv_eta > 0.0; }
};

double clamp1(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// ---------------------------------------------------------------- 1-D path

// One-sided derivatives of the full objective at theta.
std::pair<double, double> deriv_1d(const Problem& pb, double theta) {
    Vector x{theta};
    double d = pb.smooth_grad(x)[0];
    if (pb.l1 == 0.0) return {d, d};
    if (theta > 0.0) return {d + pb.l1, d + pb.l1};
    if (theta < 0.0) return {d - pb.l1, d - pb.l1};
    return {d - pb.l1, d + pb.l1};
}

SolveReport solve_bisection_1d(const Problem& pb) {
    double lo, hi;
    bool entropy = pb.has_ref() && pb.R->kind == ReferenceFunction::Kind::neg_entropy;
    if (pb.dom.kind == DomainSpec::Kind::box) {
        lo = pb.dom.lo[0];
        hi = pb.dom.hi[0];
    } else {
        // bracket a sign change by doubling outward
        lo = entropy ? kEntropyFloor : -1.0;
        hi = 1.0;
        int guard = 0;
        while (!entropy && deriv_1d(pb, lo).second > 0.0 && lo > -1e90 && ++guard < 400)
            lo *= 2.0;
        while (deriv_1d(pb, hi).first < 0.0 && hi < 1e90 && ++guard < 800) hi *= 2.0;
        if (!entropy && deriv_1d(pb, lo).second > 0.0)
            throw UnboundedDomain("minimize_sum: objective unbounded below");
        if (deriv_1d(pb, hi).first < 0.0)
            throw UnboundedDomain("minimize_sum: objective unbounded below");
    }
    if (entropy) lo = std::max(lo, kEntropyFloor);

    auto finish = [&](double theta, double res, int it) {
        Vector x{theta};
        return SolveReport{x, pb.value(x), res, SolveMethod::bisection_1d, it};
    };

    // endpoint optimality
    if (deriv_1d(pb, lo).second >= 0.0) return finish(lo, 0.0, 0);
    if (deriv_1d(pb, hi).first <= 0.0) return finish(hi, 0.0, 0);
    // subdifferential check at the l1 kink: exact zeros stay exact
    if (pb.l1 > 0.0 && lo < 0.0 && hi > 0.0) {
        auto [dm, dp] = deriv_1d(pb, 0.0);
        if (dm <= 0.0 && dp >= 0.0) return finish(0.0, 0.0, 0);
    }

    double a = lo, b = hi;
    int it = 0;
    for (; it < 200 && b - a > 1e-12 * std::max(1.0, std::max(std::fabs(a), std::fabs(b))); ++it) {
        double m = 0.5 * (a + b);
        auto [dm, dp] = deriv_1d(pb, m);
        if (dp < 0.0)
            a = m;
        else if (dm > 0.0)
            b = m;
        else
            return finish(m, 0.0, it); // 0 in the subdifferential
    }
    return finish(0.5 * (a + b), b - a, it);
}

// ------------------------------------------------------- all-linear paths

SolveReport solve_linear(const Problem& pb) {
    const std::size_t n = pb.dom.dimension();
    Vector c = pb.agg.gsum.empty() ? Vector(n, 0.0) : pb.agg.gsum;

    if (!pb.has_ref()) {
        switch (pb.dom.kind) {
            case DomainSpec::Kind::box: {
                if (pb.agg.empty() && pb.l1 == 0.0)
                    return {pb.dom.midpoint(), 0.0, 0.0, SolveMethod::closed_form, 0};
                // separable piecewise-linear: best of {lo, 0, hi} per coordinate
                Vector x(n);
                for (std::size_t i = 0; i < n; ++i) {
                    double best = pb.dom.lo[i];
                    double bestv = c[i] * best + pb.l1 * std::fabs(best);
                    for (double cand : {clamp1(0.0, pb.dom.lo[i], pb.dom.hi[i]), pb.dom.hi[i]}) {
                        double v = c[i] * cand + pb.l1 * std::fabs(cand);
                        if (v < bestv) {
                            bestv = v;
                            best = cand;
                        }
                    }
                    x[i] = best;
                }
                return {x, pb.value(x), 0.0, SolveMethod::closed_form, 0};
            }
            case DomainSpec::Kind::simplex: {
                std::size_t j = 0;
                for (std::size_t i = 1; i < n; ++i)
                    if (c[i] < c[j]) j = i;
                Vector x(n, 0.0);
                x[j] = 1.0;
                return {x, pb.value(x), 0.0, SolveMethod::closed_form, 0};
            }
            case DomainSpec::Kind::all_space: {
                bool zero = norm2sq(c) == 0.0;
                if (zero) return {Vector(n, 0.0), pb.value(Vector(n, 0.0)), 0.0,
                                  SolveMethod::closed_form, 0};
                throw UnboundedDomain("minimize_sum: linear objective unbounded on all_space");
            }
        }
    }

    const ReferenceFunction& R = *pb.R;
    const double ie = pb.inv_eta;
    switch (R.kind) {
        case ReferenceFunction::Kind::squared_l2: {
            if (pb.dom.kind == DomainSpec::Kind::simplex)
                return {project_simplex_euclidean(scaled(c, -1.0 / ie)),
                        0.0, 0.0, SolveMethod::closed_form, 0};
            Vector x(n);
            for (std::size_t i = 0; i < n; ++i) {
                x[i] = soft_threshold(-c[i] / ie, pb.l1 / ie);
                if (pb.dom.kind == DomainSpec::Kind::box)
                    x[i] = clamp1(x[i], pb.dom.lo[i], pb.dom.hi[i]);
            }
            SolveReport r{x, pb.value(x), 0.0, SolveMethod::closed_form, 0};
            return r;
        }
        case ReferenceFunction::Kind::neg_entropy: {
            if (pb.dom.kind == DomainSpec::Kind::simplex) {
                // exponential weights; l1 is constant on the simplex
                double mx = -c[0];
                for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, -c[i]);
                Vector x(n);
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    x[i] = std::exp((-c[i] - mx) / ie);
                    s += x[i];
                }
                for (double& v : x) v /= s;
                return {x, pb.value(x), 0.0, SolveMethod::closed_form, 0};
            }
            Vector x(n);
            for (std::size_t i = 0; i < n; ++i) {
                double v = std::exp(-(c[i] + pb.l1) / ie - 1.0);
                double lo = pb.dom.kind == DomainSpec::Kind::box
                                ? std::max(pb.dom.lo[i], kEntropyFloor)
                                : kEntropyFloor;
                double hi = pb.dom.kind == DomainSpec::Kind::box
                                ? pb.dom.hi[i]
                                : std::numeric_limits<double>::infinity();
                x[i] = clamp1(v, lo, hi);
            }
            return {x, pb.value(x), 0.0, SolveMethod::closed_form, 0};
        }
        case ReferenceFunction::Kind::poly_norm: {
            if (pb.l1 > 0.0) return {}; // caller falls through to the generic path
            Vector x0 = grad_conjugate(R, scaled(c, -1.0 / ie));
            ProjectionResult pr = bregman_project(R, x0, pb.dom);
            return {pr.point, pb.value(pr.point), pr.residual, SolveMethod::closed_form,
                    pr.iterations};
        }
    }
    return {};
}

// -------------------------------------------------------- generic fallback

// Proximal gradient with backtracking. The smooth part is the loss sum plus
// inv_eta * R; l1 and the domain enter through the prox step. Residual is
// the unit-step prox-gradient mapping norm at the reported point.
SolveReport solve_descent(const Problem& pb, Vector start) {
    const int budget = 2000;
    auto prox = [&](Vector v, double step) {
        if (pb.l1 > 0.0 && pb.dom.kind != DomainSpec::Kind::simplex)
            for (double& u : v) u = soft_threshold(u, pb.l1 * step);
        return pb.dom.clamp(v);
    };
    auto mapping_residual = [&](const Vector& x, const Vector& g) {
        Vector cand(x);
        axpy(cand, -1.0, g);
        return linf_dist(x, prox(std::move(cand), 1.0));
    };

    Vector x = prox(std::move(start), 1.0);
    if (pb.has_ref() && pb.R->kind == ReferenceFunction::Kind::neg_entropy)
        for (double& v : x) v = std::max(v, kEntropyFloor);
    double fx = pb.value(x);
    Vector best = x;
    double fbest = fx;
    double best_res = std::numeric_limits<double>::infinity();
    double step = 1.0;
    int it = 0;
    for (; it < budget; ++it) {
        Vector g = pb.smooth_grad(x);
        double res = mapping_residual(x, g);
        if (fx < fbest || (fx == fbest && res < best_res)) {
            fbest = fx;
            best = x;
            best_res = res;
        }
        if (res <= 1e-11) break;
        step = std::min(step * 2.0, 1e8);
        Vector xn;
        double fn = fx;
        for (int ls = 0; ls < 90; ++ls) {
            Vector cand(x);
            axpy(cand, -step, g);
            cand = prox(std::move(cand), step);
            double fc = pb.value(cand);
            if (std::isfinite(fc) && fc <= fx) {
                xn = std::move(cand);
                fn = fc;
                break;
            }
            step *= 0.5;
        }
        if (xn.empty()) break;
        bool stall = fn >= fx - 1e-16 * std::max(1.0, std::fabs(fx));
        x = std::move(xn);
        fx = fn;
        if (stall && res <= 1e-9) break;
    }
    if (best_res == std::numeric_limits<double>::infinity())
        best_res = mapping_residual(best, pb.smooth_grad(best));
    return {best, fbest, best_res, SolveMethod::projected_subgradient, it};
}

Problem make_problem(const std::vector<LossFunction>& objectives,
                     const CompositeRegularizer& extra, double extra_weight,
                     const std::optional<ReferenceFunction>& R, double inv_eta,
                     const DomainSpec& dom) {
    if (extra_weight < 0.0) throw ParamError("minimize_sum: extra_weight must be >= 0");
    if (inv_eta < 0.0) throw ParamError("minimize_sum: inv_eta must be >= 0");
    Problem pb;
    pb.dom = dom;
    if (extra.kind == CompositeRegularizer::Kind::indicator && extra_weight > 0.0) {
        // fold the indicator support into the feasible set
        if (dom.kind == DomainSpec::Kind::all_space)
            pb.dom = extra.dom;
        else if (!(dom == extra.dom))
            throw ParamError("minimize_sum: indicator support conflicts with dom");
    } else if (extra.kind == CompositeRegularizer::Kind::l1) {
        pb.l1 = extra_weight * extra.lambda;
    }
    pb.R = R;
    pb.inv_eta = R ? inv_eta : 0.0;
    const std::size_t n = pb.dom.dimension();
    for (const auto& f : objectives) {
        if (f.dimension() != 0 && f.dimension() != n)
            throw ParamError("minimize_sum: loss dimension mismatch");
        pb.agg.add(f, n);
    }
    return pb;
}

SolveReport dispatch(const Problem& pb) {
    const std::size_t n = pb.dom.dimension();

    if (pb.dom.kind == DomainSpec::Kind::simplex && n == 1) {
        Vector x{1.0};
        return {x, pb.value(x), 0.0, SolveMethod::closed_form, 0};
    }

    // pure reference minimization: argmin R over dom via the conjugate map;
    // with nothing to minimize at all, the tie-break is the domain midpoint
    if (pb.agg.empty() && pb.l1 == 0.0) {
        if (pb.has_ref()) {
            Vector x0 = grad_conjugate(*pb.R, Vector(n, 0.0));
            ProjectionResult pr = bregman_project(*pb.R, x0, pb.dom);
            return {pr.point, pb.value(pr.point), pr.residual, SolveMethod::closed_form,
                    pr.iterations};
        }
        return {pb.dom.midpoint(), 0.0, 0.0, SolveMethod::closed_form, 0};
    }

    if (n == 1 && pb.dom.kind != DomainSpec::Kind::simplex) return solve_bisection_1d(pb);

    if (pb.agg.all_linear()) {
        SolveReport r = solve_linear(pb);
        if (!r.minimizer.empty()) return r; // poly_norm with l1 falls through
    }

    // nondecreasing radial objective: the feasible point closest to the origin
    bool ref_radial = !pb.has_ref() || pb.R->kind != ReferenceFunction::Kind::neg_entropy;
    if (pb.agg.radial() && ref_radial) {
        Vector x = pb.dom.kind == DomainSpec::Kind::simplex ? pb.dom.midpoint()
                                                            : pb.dom.clamp(Vector(n, 0.0));
        return {x, pb.value(x), 0.0, SolveMethod::closed_form, 0};
    }

    return solve_descent(pb, pb.dom.midpoint());
}

} // namespace

SolveReport minimize_sum(const std::vector<LossFunction>& objectives,
                         const CompositeRegularizer& extra, double extra_weight,
                         const std::optional<ReferenceFunction>& R, double inv_eta,
                         const DomainSpec& dom) {
    Problem pb = make_problem(objectives, extra, extra_weight, R, inv_eta, dom);
    return dispatch(pb);
}

SolveReport minimize_linear_plus_ref(const Vector& g_sum, double eta, const ReferenceFunction& R,
                                     const DomainSpec& dom) {
    if (!all_finite(g_sum)) throw ParamError("minimize_linear_plus_ref: non-finite input");
    if (!(eta > 0.0)) throw ParamError("minimize_linear_plus_ref: eta must be positive");
    Vector x0 = grad_conjugate(R, scaled(g_sum, -eta));
    ProjectionResult pr = bregman_project(R, x0, dom);
    if (pr.residual > 1e-8)
        throw ConvergenceError("minimize_linear_plus_ref: projection residual above 1e-8");
    double obj = eta * dot(g_sum, pr.point) + R.value(pr.point);
    return {pr.point, obj, pr.residual, SolveMethod::closed_form, pr.iterations};
}

Vector comparator_argmin(const std::vector<LossFunction>& losses,
                         const CompositeRegularizer& extra, const DomainSpec& dom, int grid) {
    if (!dom.bounded()) throw UnboundedDomain("comparator_argmin: needs a bounded domain");
    if (grid < 2) throw ParamError("comparator_argmin: grid must be >= 2");
    const std::size_t n = dom.dimension();
    const double T = static_cast<double>(losses.size());

    SumOfLosses agg;
    for (const auto& f : losses) agg.add(f, n);
    auto total = [&](const Vector& z) { return agg.value(z) + T * extra.value(z); };

    Vector best;
    double fbest = std::numeric_limits<double>::infinity();
    auto consider = [&](const Vector& z) {
        double v = total(z);
        if (v < fbest) {
            fbest = v;
            best = z;
        }
    };

    double spacing = 0.0;
    if (dom.kind == DomainSpec::Kind::box) {
        // cap the cartesian grid at ~2e6 points
        int m = grid;
        while (n >= 2 && std::pow(static_cast<double>(m), static_cast<double>(n)) > 2e6)
            m = m / 2 + 1;
        std::vector<int> idx(n, 0);
        Vector z(n);
        bool done = false;
        while (!done) {
            for (std::size_t i = 0; i < n; ++i) {
                double f = static_cast<double>(idx[i]) / (m - 1);
                z[i] = dom.lo[i] + f * (dom.hi[i] - dom.lo[i]);
                spacing = std::max(spacing, (dom.hi[i] - dom.lo[i]) / (m - 1));
            }
            consider(z);
            std::size_t k = 0;
            for (; k < n; ++k) {
                if (++idx[k] < m) break;
                idx[k] = 0;
            }
            done = k == n;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            Vector v(n, 0.0);
            v[i] = 1.0;
            consider(v);
        }
        consider(dom.midpoint());
        Rng rng(0xC0FFEEULL);
        for (int k = 0; k < grid; ++k) consider(dom.sample(rng));
        spacing = 0.05;
    }

    // one local refinement pass
    try {
        DomainSpec local = dom;
        if (dom.kind == DomainSpec::Kind::box) {
            Vector lo(n), hi(n);
            for (std::size_t i = 0; i < n; ++i) {
                lo[i] = std::max(dom.lo[i], best[i] - spacing);
                hi[i] = std::min(dom.hi[i], best[i] + spacing);
            }
            local = DomainSpec::Box(lo, hi);
        }
        SolveReport r = minimize_sum(losses, extra, T, std::nullopt, 0.0, local);
        if (dom.contains(r.minimizer) && total(r.minimizer) < fbest) best = r.minimizer;
    } catch (const std::exception&) {
        // keep the grid point
    }
    return best;
}

} // namespace ocol
