#pragma once

#include <cstdint>
#include <utility>

#include "bmgd/dense.hpp"

namespace bmgd::numerics {

// Solves A x = b for symmetric positive definite A via Cholesky (LL^T).
// Throws FactorizationError when A is detectably asymmetric or a pivot is
// not strictly positive.
Vec spd_solve(const DenseMatrix& a, const Vec& b);

// LU factorization with partial pivoting, for the general (non-symmetric)
// solves. Kept as an object so one factorization can serve several
// right-hand sides plus the condition estimator.
class LuFactor {
public:
    explicit LuFactor(const DenseMatrix& a);

    Vec solve(const Vec& b) const;

    // Solve followed by one step of iterative refinement against the
    // original matrix; tightens the residual by roughly a factor kappa*eps.
    Vec solve_refined(const Vec& b) const;

    // Hager-style 1-norm condition estimate ||A||_1 * ||A^-1||_1.
    double condition_estimate() const;

private:
    Vec solve_transposed(const Vec& b) const;

    DenseMatrix original_;
    DenseMatrix lu_;
    std::vector<std::size_t> perm_;
};

// (lambda_max, lambda_min) of a symmetric matrix via cyclic Jacobi sweeps.
// Relative accuracy ~1e-8 on the extremes at desk scale. Asymmetric input
// beyond a small tolerance throws.
std::pair<double, double> sym_eigen_extremes(const DenseMatrix& a);

// Full eigenvalue list from the same Jacobi reduction, ascending.
Vec jacobi_eigenvalues(const DenseMatrix& a);

struct SpectralRadiusResult {
    double value = 0.0;        // growth-rate estimate of max |eigenvalue|
    double sigma_max = 0.0;    // largest singular value (upper bound cross-check)
    bool converged = false;
    std::uint32_t iterations = 0;  // total matrix applications across restarts
};

struct SpectralRadiusOptions {
    double rel_tol = 1e-6;
    std::uint32_t max_iterations = 20000;  // per restart
    std::uint32_t restarts = 5;
    std::uint64_t seed = 0x5eedULL;
};

// Spectral radius of a general square matrix by power iteration. The
// estimate is the growth rate of the iterate norms measured over q-step
// windows (q = 1..12): operators whose dominant eigenvalues form an
// equal-magnitude group of size q (conjugate pairs, cyclic block operators)
// have norms that oscillate with period q, and the matching window
// converges geometrically where the plain one-step ratio never settles.
// Runs `restarts` seeded random starts and keeps the largest estimate;
// sigma_max(A) from the same machinery on A^T A is reported as an upper
// bound sanity check. Throws ConvergenceError (carrying the best estimate)
// if no restart stabilizes.
SpectralRadiusResult spectral_radius(const DenseMatrix& a, const SpectralRadiusOptions& opts = {});

}  // namespace bmgd::numerics
