#pragma once

#include <cstdint>
#include <vector>

#include "bmgd/dataset.hpp"
#include "bmgd/numerics.hpp"
#include "bmgd/partition.hpp"

// Closed-form view of buffered least-squares training on fixed partitions
// at a constant rate. One epoch on buffer k applies the affine map
//
//   theta <- A_k theta + alpha * B_k,
//
// where A_k is the product of the per-mini-batch factors (I - alpha Sxx)
// in consumption order and B_k collects the Sxy terms each factor drags
// along. T epochs compose to C_k = A_k^T with intercept D_k, and chaining
// the K buffers in sequence gives a stacked linear fixed-point system
// whose solution is where the training loop actually settles.
namespace bmgd::linsys {

using numerics::DenseMatrix;
using numerics::Vec;

struct BufferOperators {
    DenseMatrix a;  // one epoch: product of (I - alpha Sxx) over the M batches
    Vec b;          // one epoch intercept (alpha factored out)
    DenseMatrix c;  // T epochs: a^T (matrix power)
    Vec d;          // T epochs intercept: (I + a + ... + a^{T-1}) b
};

// Per-buffer operators from the dataset's own mini-batch moments. Only
// fixed partitions have well-defined operators (reshuffling modes change
// the batches under the map), so any other plan mode throws
// InvalidArgumentError. Least-squares only.
std::vector<BufferOperators> build_buffer_operators(const datagen::Dataset& ds,
                                                    const partition::PartitionPlan& plan,
                                                    double alpha, std::uint64_t t_epochs);

// The K per-buffer maps stacked into one Kp x Kp system on
// (theta^(1), ..., theta^(K)): buffer 1 reads buffer K's output (block row
// 1 has C_1 in column block K), buffer k reads buffer k-1. The fixed point
// solves theta_star = c_star theta_star + alpha d_star.
struct StackedSystem {
    DenseMatrix c_star;
    Vec d_star;
    std::uint64_t k = 0;
    std::uint64_t p = 0;
};

StackedSystem assemble_system(const std::vector<BufferOperators>& ops);

struct StablePoint {
    Vec stacked;                      // all K fixed-point blocks
    Vec theta;                        // block K: where end-of-iteration iterates land
    double residual = 0.0;            // max |theta* - (C* theta* + alpha D*)| / max(1, |theta*|)
    double condition_estimate = 0.0;  // 1-norm estimate for I - C*
};

// LU solve of (I - C*) theta = alpha D* with one refinement pass. Throws
// SingularSystemError when the stacked map has no isolated fixed point
// (alpha = 0, or a rate at the stability boundary).
StablePoint solve_stable_point(const StackedSystem& sys, double alpha);

// Replay of the training loop at the operator level: R sequential cycles
//   theta <- C_k theta + alpha D_k,   k = 1..K,
// recording theta after each full cycle. On fixed partitions at constant
// rate this matches the engine's end-of-iteration iterates to roundoff.
std::vector<Vec> recurrence_trajectory(const std::vector<BufferOperators>& ops, const Vec& theta0,
                                       double alpha, std::uint64_t iterations);

struct ConvergenceCertificate {
    double lambda_min = 0.0;   // extreme eigenvalues of the full-data Sxx
    double lambda_max = 0.0;
    double alpha_max = 0.0;    // 2 / lambda_max: rates above this diverge
    double rho_bound = 0.0;    // max(|1 - alpha lambda|) over the spectrum, ^(T*M)
    double rho_stacked = 0.0;  // empirical spectral radius of C*
    double cycle_rate = 0.0;   // rho_stacked^K: contraction per full K-buffer cycle
    bool contracts = false;    // rho_stacked < 1
};

// Spectral diagnostics: eigenvalue range of the full-data moment matrix,
// the resulting stability ceiling and worst-mode decay bound, and the
// measured spectral radius of the stacked operator. The stacked radius is
// the K-th root of the cycle contraction (the K dominant roots of a
// cyclic block operator share one magnitude), so per-iteration error decay
// follows rho_stacked^K.
ConvergenceCertificate certify(const datagen::Dataset& ds, const StackedSystem& sys, double alpha,
                               std::uint64_t t_epochs, std::uint64_t m_batches);

// || stable point - full-data least squares solution ||_2. The gap is the
// price of buffering: it shrinks linearly with alpha and vanishes as the
// partition becomes the full batch.
double stable_ols_distance(const datagen::Dataset& ds, const StablePoint& sol);

}  // namespace bmgd::linsys
