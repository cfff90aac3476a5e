#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ocol/errors.hpp"

namespace ocol {

using Vector = std::vector<double>;

inline bool all_finite(const Vector& x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

inline double dot(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2sq(const Vector& x) { return dot(x, x); }
inline double norm2(const Vector& x) { return std::sqrt(norm2sq(x)); }

inline double norm1(const Vector& x) {
    double s = 0.0;
    for (double v : x) s += std::fabs(v);
    return s;
}

inline double linf_dist(const Vector& a, const Vector& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

// y += a*x
inline void axpy(Vector& y, double a, const Vector& x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

inline Vector scaled(const Vector& x, double a) {
    Vector r(x);
    for (double& v : r) v *= a;
    return r;
}

inline Vector sub(const Vector& a, const Vector& b) {
    Vector r(a);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}

// Deterministic per-(seed,t) stream mixing (splitmix64 finalizer).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t t) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (t + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform(double a, double b) {
        std::uniform_real_distribution<double> d(a, b);
        return d(eng_);
    }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

// Feasible sets: all of R^n, an axis-aligned box, or the probability simplex.
struct DomainSpec {
    enum class Kind { all_space, box, simplex };

    Kind kind = Kind::all_space;
    Vector lo, hi;       // box bounds
    std::size_t dim = 0; // dimension for all_space / simplex

    static DomainSpec AllSpace(std::size_t n) {
        DomainSpec d;
        d.kind = Kind::all_space;
        d.dim = n;
        return d;
    }

    static DomainSpec Box(Vector lo, Vector hi) {
        if (lo.size() != hi.size()) throw ParamError("box: lo/hi dimension mismatch");
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (!(lo[i] <= hi[i])) throw ParamError("box: requires lo <= hi coordinatewise");
        DomainSpec d;
        d.kind = Kind::box;
        d.dim = lo.size();
        d.lo = std::move(lo);
        d.hi = std::move(hi);
        return d;
    }

    static DomainSpec Simplex(std::size_t n) {
        if (n == 0) throw ParamError("simplex: dimension must be positive");
        DomainSpec d;
        d.kind = Kind::simplex;
        d.dim = n;
        return d;
    }

    std::size_t dimension() const { return dim; }
    bool bounded() const { return kind != Kind::all_space; }

    bool contains(const Vector& x, double tol = 1e-9) const {
        if (x.size() != dim) return false;
        switch (kind) {
            case Kind::all_space:
                return all_finite(x);
            case Kind::box:
                for (std::size_t i = 0; i < dim; ++i)
                    if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
                return true;
            case Kind::simplex: {
                double s = 0.0;
                for (double v : x) {
                    if (v < -tol) return false;
                    s += v;
                }
                return std::fabs(s - 1.0) <= tol;
            }
        }
        return false;
    }

    // Euclidean clamp; identity on all_space, exact simplex projection for simplex.
    Vector clamp(const Vector& x) const;

    Vector midpoint() const {
        switch (kind) {
            case Kind::all_space:
                return Vector(dim, 0.0);
            case Kind::box: {
                Vector m(dim);
                for (std::size_t i = 0; i < dim; ++i) m[i] = 0.5 * (lo[i] + hi[i]);
                return m;
            }
            case Kind::simplex:
                return Vector(dim, 1.0 / static_cast<double>(dim));
        }
        return {};
    }

    // Uniform over boxes, flat Dirichlet over the simplex.
    Vector sample(Rng& rng) const {
        switch (kind) {
            case Kind::all_space:
                throw UnboundedDomain("cannot sample uniformly from all_space");
            case Kind::box: {
                Vector x(dim);
                for (std::size_t i = 0; i < dim; ++i) x[i] = rng.uniform(lo[i], hi[i]);
                return x;
            }
            case Kind::simplex: {
                Vector x(dim);
                double s = 0.0;
                for (std::size_t i = 0; i < dim; ++i) {
                    double u = rng.uniform(0.0, 1.0);
                    x[i] = -std::log(std::max(u, 1e-300));
                    s += x[i];
                }
                for (double& v : x) v /= s;
                return x;
            }
        }
        return {};
    }

    double diameter() const {
        switch (kind) {
            case Kind::all_space:
                throw UnboundedDomain("all_space has no finite diameter");
            case Kind::box: {
                double s = 0.0;
                for (std::size_t i = 0; i < dim; ++i) s += (hi[i] - lo[i]) * (hi[i] - lo[i]);
                return std::sqrt(s);
            }
            case Kind::simplex:
                return std::sqrt(2.0);
        }
        return 0.0;
    }

    bool operator==(const DomainSpec& o) const {
        return kind == o.kind && lo == o.lo && hi == o.hi && dim == o.dim;
    }
};

// Exact Euclidean projection onto the probability simplex (sort-based).
Vector project_simplex_euclidean(const Vector& y);

inline Vector DomainSpec::clamp(const Vector& x) const {
    switch (kind) {
        case Kind::all_space:
            return x;
        case Kind::box: {
            Vector r(x);
            for (std::size_t i = 0; i < dim; ++i) r[i] = std::min(std::max(r[i], lo[i]), hi[i]);
            return r;
        }
        case Kind::simplex:
            return project_simplex_euclidean(x);
    }
    return x;
}

} // namespace ocol
