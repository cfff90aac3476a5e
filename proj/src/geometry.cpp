#include "ocol/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ocol {

Vector project_simplex_euclidean(const Vector& y) {
    const std::size_t n = y.size();
    Vector u(y);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, tau = 0.0;
    std::size_t rho = 0;
    for (std::size_t j = 0; j < n; ++j) {
        css += u[j];
        double t = (css - 1.0) / static_cast<double>(j + 1);
        if (u[j] - t > 0.0) {
            rho = j + 1;
            tau = t;
        }
    }
    (void)rho;
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::max(y[i] - tau, 0.0);
    return x;
}

namespace {

void check_entropy_domain(const Vector& x) {
    for (double v : x)
        if (v < -kEntropyFloor)
            throw DomainError("neg_entropy: negative coordinate outside domain");
}

double entropy_coord(double v) {
    double c = std::max(v, kEntropyFloor);
    return c * std::log(c);
}

} // namespace

double ReferenceFunction::value(const Vector& x) const {
    if (!all_finite(x)) throw DomainError("ref_value: non-finite input");
    switch (kind) {
        case Kind::squared_l2:
            return 0.5 * norm2sq(x);
        case Kind::poly_norm:
            return scale / (2.0 * p) * std::pow(norm2sq(x), p);
        case Kind::neg_entropy: {
            check_entropy_domain(x);
            double s = 0.0;
            for (double v : x) s += entropy_coord(v);
            return s;
        }
    }
    return 0.0;
}

Vector ReferenceFunction::gradient(const Vector& x) const {
    if (!all_finite(x)) throw DomainError("ref_gradient: non-finite input");
    switch (kind) {
        case Kind::squared_l2:
            return x;
        case Kind::poly_norm: {
            // grad = scale * ||x||^(2p-2) x
            double n2 = norm2sq(x);
            double c = scale * std::pow(n2, p - 1);
            return scaled(x, n2 == 0.0 ? 0.0 : c);
        }
        case Kind::neg_entropy: {
            check_entropy_domain(x);
            Vector g(x.size());
            for (std::size_t i = 0; i < x.size(); ++i)
                g[i] = 1.0 + std::log(std::max(x[i], kEntropyFloor));
            return g;
        }
    }
    return {};
}

double ref_value(const ReferenceFunction& R, const Vector& x) { return R.value(x); }
Vector ref_gradient(const ReferenceFunction& R, const Vector& x) { return R.gradient(x); }

double bregman_divergence(const ReferenceFunction& R, const Vector& x, const Vector& y) {
    if (x.size() != y.size()) throw ParamError("bregman_divergence: dimension mismatch");
    Vector gy = R.gradient(y);
    double d = R.value(x) - R.value(y) - dot(gy, sub(x, y));
    return d;
}

Vector grad_conjugate(const ReferenceFunction& Phi, const Vector& g_hat) {
    if (!all_finite(g_hat)) throw RangeError("grad_conjugate: non-finite input");
    switch (Phi.kind) {
        case ReferenceFunction::Kind::squared_l2:
            return g_hat;
        case ReferenceFunction::Kind::poly_norm: {
            // ||x|| = (||g||/scale)^(1/(2p-1)), x aligned with g_hat.
            double r = norm2(g_hat);
            if (r == 0.0) return Vector(g_hat.size(), 0.0);
            double mag = std::pow(r / Phi.scale, 1.0 / (2.0 * Phi.p - 1.0));
            return scaled(g_hat, mag / r);
        }
        case ReferenceFunction::Kind::neg_entropy: {
            Vector x(g_hat.size());
            for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::exp(g_hat[i] - 1.0);
            if (!all_finite(x)) throw RangeError("grad_conjugate: entropy dual overflow");
            return x;
        }
    }
    return {};
}

double three_point_residual(const ReferenceFunction& R, const Vector& z, const Vector& x,
                            const Vector& y) {
    double lhs = bregman_divergence(R, x, y) + bregman_divergence(R, z, x) -
                 bregman_divergence(R, z, y);
    double rhs = dot(sub(R.gradient(x), R.gradient(y)), sub(x, z));
    return std::fabs(lhs - rhs);
}

namespace {

// Variational-inequality residual of x as a candidate minimizer of
// D_Phi(., y) over a box: the l_inf norm of the projected gradient.
double box_vi_residual(const Vector& x, const Vector& grad, const DomainSpec& box) {
    double r = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double step = std::min(std::max(x[i] - grad[i], box.lo[i]), box.hi[i]);
        r = std::max(r, std::fabs(x[i] - step));
    }
    return r;
}

// argmin over a box of Phi(x) - <ghat, x> for radial Phi = poly_norm.
// Stationarity on free coordinates reads s * x = ghat with the scalar
// s = scale * (||x||^2)^(p-1), so x(s) = clamp(ghat/s) and s solves the
// monotone equation s = scale * (||x(s)||^2)^(p-1). Bisection on s.
ProjectionResult project_polynorm_box(const ReferenceFunction& Phi, const Vector& ghat,
                                      const DomainSpec& box) {
    const int budget = 200;
    const double tol = 1e-10;
    auto x_of = [&](double s) {
        Vector x(ghat.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            x[i] = std::min(std::max(ghat[i] / s, box.lo[i]), box.hi[i]);
        return x;
    };
    auto residual_at = [&](const Vector& x) {
        Vector g = sub(Phi.gradient(x), ghat);
        return box_vi_residual(x, g, box);
    };

    if (norm2(ghat) == 0.0) {
        Vector x = box.clamp(Vector(ghat.size(), 0.0));
        return {x, residual_at(x), 0};
    }

    // h(s) = s - scale*(||x(s)||^2)^(p-1) is increasing; bracket a sign change.
    auto h = [&](double s) { return s - Phi.scale * std::pow(norm2sq(x_of(s)), Phi.p - 1); };
    double s_lo = 1e-300, s_hi = 1.0;
    while (h(s_hi) < 0.0 && s_hi < 1e290) s_hi *= 8.0;
    Vector best = x_of(s_hi);
    double best_res = residual_at(best);
    int it = 0;
    for (; it < budget; ++it) {
        double s = 0.5 * (s_lo + s_hi);
        Vector x = x_of(s);
        double res = residual_at(x);
        if (res < best_res) {
            best_res = res;
            best = x;
        }
        if (best_res <= tol) break;
        if (h(s) < 0.0)
            s_lo = s;
        else
            s_hi = s;
    }
    if (best_res > 1e-8)
        throw ConvergenceError("bregman_project: poly_norm box solver exhausted budget");
    return {best, best_res, it};
}

// Projected gradient with backtracking for the remaining smooth cases
// (poly_norm over the simplex). Euclidean projection as the inner step;
// the reported residual is the unit-step projected-gradient norm.
ProjectionResult project_descent(const ReferenceFunction& Phi, const Vector& y,
                                 const DomainSpec& dom) {
    const int budget = 200;
    const double tol = 1e-10;
    Vector ghat = Phi.gradient(y);
    auto obj = [&](const Vector& x) { return Phi.value(x) - dot(ghat, x); };
    auto vi_residual = [&](const Vector& x, const Vector& g) {
        Vector step(x);
        axpy(step, -1.0, g);
        return linf_dist(x, dom.clamp(step));
    };

    Vector x = dom.clamp(y);
    double fx = obj(x);
    double res = std::numeric_limits<double>::infinity();
    int it = 0;
    for (; it < budget; ++it) {
        Vector g = sub(Phi.gradient(x), ghat);
        res = vi_residual(x, g);
        if (res <= tol) break;
        double step = 1.0;
        Vector xn;
        double fn = fx;
        for (int ls = 0; ls < 60; ++ls) {
            Vector cand(x);
            axpy(cand, -step, g);
            cand = dom.clamp(cand);
            double fc = obj(cand);
            if (fc <= fx) {
                xn = std::move(cand);
                fn = fc;
                break;
            }
            step *= 0.5;
        }
        if (xn.empty()) break;
        x = std::move(xn);
        fx = fn;
    }
    if (res > 1e-7)
        throw ConvergenceError("bregman_project: descent solver exhausted budget");
    return {x, res, it};
}

} // namespace

ProjectionResult bregman_project(const ReferenceFunction& Phi, const Vector& y,
                                 const DomainSpec& dom) {
    if (!all_finite(y)) throw RangeError("bregman_project: non-finite input");
    if (y.size() != dom.dimension()) throw ParamError("bregman_project: dimension mismatch");
    if (dom.contains(y)) return {y, 0.0, 0};

    switch (dom.kind) {
        case DomainSpec::Kind::all_space:
            return {y, 0.0, 0};
        case DomainSpec::Kind::box:
            switch (Phi.kind) {
                case ReferenceFunction::Kind::squared_l2:
                    return {dom.clamp(y), 0.0, 0};
                case ReferenceFunction::Kind::neg_entropy: {
                    // separable: per-coordinate clamp onto box ∩ positive orthant
                    Vector x(y.size());
                    for (std::size_t i = 0; i < y.size(); ++i) {
                        double lo = std::max(dom.lo[i], kEntropyFloor);
                        x[i] = std::min(std::max(y[i], lo), dom.hi[i]);
                    }
                    return {x, 0.0, 0};
                }
                case ReferenceFunction::Kind::poly_norm:
                    return project_polynorm_box(Phi, Phi.gradient(y), dom);
            }
            break;
        case DomainSpec::Kind::simplex:
            switch (Phi.kind) {
                case ReferenceFunction::Kind::squared_l2:
                    return {project_simplex_euclidean(y), 0.0, 0};
                case ReferenceFunction::Kind::neg_entropy: {
                    // entropy projection = positive part + normalization
                    Vector x(y.size());
                    double s = 0.0;
                    for (std::size_t i = 0; i < y.size(); ++i) {
                        x[i] = std::max(y[i], kEntropyFloor);
                        s += x[i];
                    }
                    for (double& v : x) v /= s;
                    return {x, 0.0, 0};
                }
                case ReferenceFunction::Kind::poly_norm:
                    return project_descent(Phi, y, dom);
            }
            break;
    }
    throw ParamError("bregman_project: unsupported combination");
}

namespace {

// Separable closed form for D_phi(x,y) + w*|x|_1 over box/all_space when phi
// is coordinatewise (squared_l2 or neg_entropy).
ProjectionResult prox_l1_separable(const ReferenceFunction& Phi, const Vector& y, double shrink,
                                   const DomainSpec& dom) {
    Vector x(y.size());
    if (Phi.kind == ReferenceFunction::Kind::squared_l2) {
        for (std::size_t i = 0; i < y.size(); ++i) {
            double v = soft_threshold(y[i], shrink);
            if (dom.kind == DomainSpec::Kind::box)
                v = std::min(std::max(v, dom.lo[i]), dom.hi[i]);
            x[i] = v;
        }
        return {x, 0.0, 0};
    }
    // neg_entropy on the positive orthant: |x| = x, so the stationarity
    // condition is ln x = ln y - shrink.
    Vector ghat = Phi.gradient(y);
    for (std::size_t i = 0; i < y.size(); ++i) {
        double v = std::exp(ghat[i] - 1.0 - shrink);
        double lo = dom.kind == DomainSpec::Kind::box ? std::max(dom.lo[i], kEntropyFloor)
                                                      : kEntropyFloor;
        double hi = dom.kind == DomainSpec::Kind::box ? dom.hi[i]
                                                      : std::numeric_limits<double>::infinity();
        x[i] = std::min(std::max(v, lo), hi);
    }
    return {x, 0.0, 0};
}

// Proximal gradient fallback (poly_norm with l1 over a box). Residual is
// the unit-step prox-gradient mapping norm.
ProjectionResult prox_descent(const ReferenceFunction& Phi, const Vector& y, double shrink,
                              const DomainSpec& dom) {
    const int budget = 200;
    const double tol = 1e-10;
    Vector ghat = Phi.gradient(y);
    auto smooth = [&](const Vector& x) { return Phi.value(x) - dot(ghat, x); };
    auto full = [&](const Vector& x) { return smooth(x) + shrink * norm1(x); };
    auto prox = [&](Vector v, double step) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] = soft_threshold(v[i], shrink * step);
            if (dom.kind == DomainSpec::Kind::box)
                v[i] = std::min(std::max(v[i], dom.lo[i]), dom.hi[i]);
        }
        return v;
    };
    auto mapping_residual = [&](const Vector& x, const Vector& g) {
        Vector cand(x);
        axpy(cand, -1.0, g);
        return linf_dist(x, prox(std::move(cand), 1.0));
    };

    Vector x = prox(dom.clamp(y), 1.0);
    double fx = full(x);
    double res = std::numeric_limits<double>::infinity();
    double step = 1.0;
    int it = 0;
    for (; it < budget; ++it) {
        Vector g = sub(Phi.gradient(x), ghat);
        res = mapping_residual(x, g);
        if (res <= tol) break;
        Vector xn;
        double fn = fx;
        step = std::min(step * 4.0, 1e6);
        for (int ls = 0; ls < 80; ++ls) {
            Vector cand(x);
            axpy(cand, -step, g);
            cand = prox(std::move(cand), step);
            double fc = full(cand);
            if (fc <= fx) {
                xn = std::move(cand);
                fn = fc;
                break;
            }
            step *= 0.5;
        }
        if (xn.empty()) break;
        x = std::move(xn);
        fx = fn;
    }
    if (res > 1e-7)
        throw ConvergenceError("composite_bregman_prox: solver exhausted budget");
    return {x, res, it};
}

} // namespace

ProjectionResult composite_bregman_prox(const ReferenceFunction& Phi, const Vector& y,
                                        const CompositeRegularizer& Psi, double weight,
                                        const DomainSpec& dom) {
    if (weight < 0.0) throw ParamError("composite_bregman_prox: weight must be >= 0");
    if (weight == 0.0 || Psi.is_zero()) return bregman_project(Phi, y, dom);

    switch (Psi.kind) {
        case CompositeRegularizer::Kind::zero:
            return bregman_project(Phi, y, dom);
        case CompositeRegularizer::Kind::indicator:
            // the constraint set rides inside Psi; dom is expected unconstrained
            if (dom.kind != DomainSpec::Kind::all_space && !(dom == Psi.dom))
                throw ParamError("composite_bregman_prox: indicator conflicts with dom");
            return bregman_project(Phi, y, Psi.dom);
        case CompositeRegularizer::Kind::l1: {
            double shrink = weight * Psi.lambda;
            if (dom.kind == DomainSpec::Kind::simplex)
                // |x|_1 is constant on the simplex
                return bregman_project(Phi, y, dom);
            if (Phi.kind == ReferenceFunction::Kind::poly_norm)
                return prox_descent(Phi, y, shrink, dom);
            return prox_l1_separable(Phi, y, shrink, dom);
        }
    }
    throw ParamError("composite_bregman_prox: unsupported combination");
}

} // namespace ocol
