#include "bmgd/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "bmgd/kernels.hpp"
#include "bmgd/rng.hpp"

namespace bmgd::numerics {

namespace {

void require_square(const DenseMatrix& a, const char* who) {
    if (a.rows() != a.cols() || a.rows() == 0)
        throw InvalidArgumentError(std::string(who) + ": expected a nonempty square matrix, got " +
                                   std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
}

double max_abs_entry(const DenseMatrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j)));
    return m;
}

void require_symmetric(const DenseMatrix& a, const char* who) {
    require_square(a, who);
    const double scale = std::max(1.0, max_abs_entry(a));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            if (std::abs(a(i, j) - a(j, i)) > 1e-8 * scale)
                throw FactorizationError(std::string(who) + ": matrix is asymmetric at (" +
                                         std::to_string(i) + "," + std::to_string(j) + ")");
}

}  // namespace

Vec spd_solve(const DenseMatrix& a, const Vec& b) {
    require_symmetric(a, "spd_solve");
    const std::size_t n = a.rows();
    if (b.size() != n) throw InvalidArgumentError("spd_solve: right-hand side length mismatch");

    // In-place lower Cholesky. The pivot floor is relative to the matrix
    // scale: exactly collinear moment matrices land at +-eps instead of a
    // clean zero, and letting those through yields huge garbage solutions.
    const double pivot_floor = 1e-13 * std::max(1.0, max_abs_entry(a));
    DenseMatrix l(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double s = kernels::dot(l.row(i), l.row(j), j);
            if (i == j) {
                const double d = a(i, i) - s;
                if (!(d > pivot_floor))
                    throw FactorizationError("spd_solve: pivot " + std::to_string(i) +
                                             " is not positive; matrix is not positive definite");
                l(i, i) = std::sqrt(d);
            } else {
                l(i, j) = (a(i, j) - s) / l(j, j);
            }
        }
    }

    // L y = b, then L^T x = y.
    Vec y(n);
    for (std::size_t i = 0; i < n; ++i)
        y[i] = (b[i] - kernels::dot(l.row(i), y.data(), i)) / l(i, i);
    Vec x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= l(j, ii) * x[j];
        x[ii] = s / l(ii, ii);
    }
    return x;
}

LuFactor::LuFactor(const DenseMatrix& a) : original_(a), lu_(a), perm_(a.rows()) {
    require_square(a, "LuFactor");
    const std::size_t n = a.rows();
    for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
    const double singular_floor = 1e-14 * std::max(1.0, max_abs_entry(a));

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(lu_(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::abs(lu_(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best < singular_floor)
            throw SingularSystemError(
                "LuFactor: pivot " + std::to_string(k) + " vanished; matrix is numerically singular",
                std::numeric_limits<double>::infinity());
        if (piv != k) {
            std::swap(perm_[piv], perm_[k]);
            for (std::size_t j = 0; j < n; ++j) std::swap(lu_(piv, j), lu_(k, j));
        }
        const double inv_piv = 1.0 / lu_(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = lu_(i, k) * inv_piv;
            lu_(i, k) = m;
            if (m != 0.0) kernels::axpy(-m, lu_.row(k) + k + 1, lu_.row(i) + k + 1, n - k - 1);
        }
    }
}

Vec LuFactor::solve(const Vec& b) const {
    const std::size_t n = perm_.size();
    if (b.size() != n) throw InvalidArgumentError("LuFactor::solve: length mismatch");
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
    for (std::size_t i = 1; i < n; ++i) x[i] -= kernels::dot(lu_.row(i), x.data(), i);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = x[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= lu_(ii, j) * x[j];
        x[ii] = s / lu_(ii, ii);
    }
    return x;
}

Vec LuFactor::solve_transposed(const Vec& b) const {
    const std::size_t n = perm_.size();
    // Solve A^T y = b as U^T z = b, L^T w = z, y = P^T w.
    Vec z(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t j = 0; j < i; ++j) s -= lu_(j, i) * z[j];
        z[i] = s / lu_(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = z[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= lu_(j, ii) * z[j];
        z[ii] = s;
    }
    Vec y(n);
    for (std::size_t i = 0; i < n; ++i) y[perm_[i]] = z[i];
    return y;
}

Vec LuFactor::solve_refined(const Vec& b) const {
    Vec x = solve(b);
    // One refinement pass: r = b - A x, x += A^-1 r.
    Vec r(b);
    const Vec ax = matvec(original_, x);
    kernels::axpy(-1.0, ax.data(), r.data(), r.size());
    const Vec dx = solve(r);
    kernels::axpy(1.0, dx.data(), x.data(), x.size());
    return x;
}

double LuFactor::condition_estimate() const {
    const std::size_t n = perm_.size();
    double norm_a = 0.0;  // 1-norm = max column sum
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += std::abs(original_(i, j));
        norm_a = std::max(norm_a, s);
    }

    // Hager's estimator for ||A^-1||_1.
    Vec x(n, 1.0 / static_cast<double>(n));
    double est = 0.0;
    for (int pass = 0; pass < 5; ++pass) {
        const Vec y = solve(x);
        double y1 = 0.0;
        for (double v : y) y1 += std::abs(v);
        est = std::max(est, y1);
        Vec xi(n);
        for (std::size_t i = 0; i < n; ++i) xi[i] = (y[i] >= 0.0) ? 1.0 : -1.0;
        const Vec z = solve_transposed(xi);
        std::size_t jbest = 0;
        double zmax = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (std::abs(z[i]) > zmax) {
                zmax = std::abs(z[i]);
                jbest = i;
            }
        if (zmax <= dot(z, x)) break;
        std::fill(x.begin(), x.end(), 0.0);
        x[jbest] = 1.0;
    }
    return norm_a * est;
}

namespace {

// One full cyclic Jacobi pass; returns the rotated matrix's off-diagonal
// Frobenius norm.
double jacobi_sweep(DenseMatrix& a) {
    const std::size_t n = a.rows();
    for (std::size_t p = 0; p + 1 < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            const double apq = a(p, q);
            if (apq == 0.0) continue;
            const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
            const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
            const double c = 1.0 / std::sqrt(1.0 + t * t);
            const double s = t * c;
            for (std::size_t i = 0; i < n; ++i) {
                const double aip = a(i, p), aiq = a(i, q);
                a(i, p) = c * aip - s * aiq;
                a(i, q) = s * aip + c * aiq;
            }
            for (std::size_t i = 0; i < n; ++i) {
                const double api = a(p, i), aqi = a(q, i);
                a(p, i) = c * api - s * aqi;
                a(q, i) = s * api + c * aqi;
            }
        }
    }
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(off);
}

}  // namespace

Vec jacobi_eigenvalues(const DenseMatrix& a) {
    require_symmetric(a, "jacobi_eigenvalues");
    DenseMatrix w(a);
    double fro = 0.0;
    for (std::size_t i = 0; i < w.rows(); ++i)
        for (std::size_t j = 0; j < w.cols(); ++j) fro += w(i, j) * w(i, j);
    fro = std::sqrt(fro);
    const double target = std::max(1e-300, 1e-12 * fro);

    bool done = false;
    for (int sweep = 0; sweep < 40 && !done; ++sweep) done = jacobi_sweep(w) <= target;
    if (!done)
        throw ConvergenceError("jacobi_eigenvalues: off-diagonal mass did not vanish in 40 sweeps",
                               w(0, 0));

    Vec ev(w.rows());
    for (std::size_t i = 0; i < w.rows(); ++i) ev[i] = w(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

std::pair<double, double> sym_eigen_extremes(const DenseMatrix& a) {
    const Vec ev = jacobi_eigenvalues(a);
    return {ev.back(), ev.front()};
}

namespace {

// Growth-rate tracker: feeds on per-step norm growth factors and reports
// convergence when some q-step geometric mean stabilizes (see header).
class GrowthWindow {
public:
    explicit GrowthWindow(double rel_tol) : rel_tol_(rel_tol) {}

    void push(double log_growth) {
        cumlog_.push_back(cumlog_.empty() ? log_growth : cumlog_.back() + log_growth);
        if (cumlog_.size() > kKeep) cumlog_.pop_front();
    }

    // Best stabilized estimate, or nullopt-like flag via `ok`.
    bool converged(double& estimate) const {
        const std::size_t m = cumlog_.size();
        for (std::size_t q = 1; q <= kMaxPeriod; ++q) {
            if (m < 3 * q + 1) continue;
            const double e0 = window_mean(q, 0);
            const double e1 = window_mean(q, q);
            const double e2 = window_mean(q, 2 * q);
            const double tol = rel_tol_ * std::max(std::abs(e0), 1e-30);
            if (std::abs(e0 - e1) <= tol && std::abs(e0 - e2) <= tol) {
                estimate = e0;
                return true;
            }
        }
        estimate = m >= 2 ? window_mean(1, 0) : 0.0;
        return false;
    }

    static constexpr std::size_t kMaxPeriod = 12;
    static constexpr std::size_t kKeep = 3 * kMaxPeriod + 1;

private:
    // exp of the mean log-growth over the q steps ending `back` steps ago.
    double window_mean(std::size_t q, std::size_t back) const {
        const std::size_t last = cumlog_.size() - 1 - back;
        return std::exp((cumlog_[last] - cumlog_[last - q]) / static_cast<double>(q));
    }

    double rel_tol_;
    std::deque<double> cumlog_;
};

struct PowerRun {
    double estimate = 0.0;
    bool converged = false;
    std::uint32_t iterations = 0;
};

// Power iteration with windowed growth estimates. `apply` maps v -> A v (or
// A^T A v for the singular-value bound).
template <typename Apply>
PowerRun run_power(const Apply& apply, std::size_t n, std::uint64_t seed, double rel_tol,
                   std::uint32_t max_iters, double growth_exponent) {
    rng::Xoshiro256pp gen(seed);
    Vec v(n);
    for (double& vi : v) vi = gen.normal();
    double nv = norm2(v);
    if (nv == 0.0) v[0] = nv = 1.0;
    kernels::scale(1.0 / nv, v.data(), v.size());

    GrowthWindow window(rel_tol);
    PowerRun out;
    for (std::uint32_t it = 1; it <= max_iters; ++it) {
        Vec w = apply(v);
        const double s = norm2(w);
        ++out.iterations;
        if (s == 0.0) {
            // Iterate annihilated: the radius along this start is exactly 0.
            out.estimate = 0.0;
            out.converged = true;
            return out;
        }
        kernels::scale(1.0 / s, w.data(), w.size());
        v = std::move(w);
        window.push(std::log(s));
        double est = 0.0;
        if (window.converged(est)) {
            out.estimate = std::pow(est, growth_exponent);
            out.converged = true;
            return out;
        }
        out.estimate = std::pow(est, growth_exponent);
    }
    return out;
}

}  // namespace

SpectralRadiusResult spectral_radius(const DenseMatrix& a, const SpectralRadiusOptions& opts) {
    require_square(a, "spectral_radius");
    const std::size_t n = a.rows();
    if (!a.all_finite()) throw InvalidArgumentError("spectral_radius: matrix has non-finite entries");

    const DenseMatrix at = transpose(a);
    SpectralRadiusResult res;
    double best_any = 0.0;

    for (std::uint32_t r = 0; r < std::max<std::uint32_t>(opts.restarts, 1); ++r) {
        const std::uint64_t seed = rng::derive_seed(opts.seed, {rng::kTagRestart, r});
        const PowerRun run = run_power([&](const Vec& v) { return matvec(a, v); }, n, seed,
                                       opts.rel_tol, opts.max_iterations, 1.0);
        res.iterations += run.iterations;
        best_any = std::max(best_any, run.estimate);
        if (run.converged) {
            res.converged = true;
            res.value = std::max(res.value, run.estimate);
        }
    }

    // Upper-bound cross-check: rho(A) <= sigma_max(A) = rho(A^T A)^(1/2).
    const PowerRun sv = run_power(
        [&](const Vec& v) {
            Vec av = matvec(a, v);
            return matvec(at, av);
        },
        n, rng::derive_seed(opts.seed, {rng::kTagRestart, 0xabcdULL}), opts.rel_tol,
        opts.max_iterations, 0.5);
    res.sigma_max = sv.estimate;

    if (!res.converged)
        throw ConvergenceError("spectral_radius: no restart stabilized within " +
                                   std::to_string(opts.max_iterations) + " iterations",
                               best_any);
    return res;
}

}  // namespace bmgd::numerics
