#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "bmgd/dataset.hpp"

namespace bmgd::losses {

// A mini-batch as the loss sees it: row indices into an (x, y) block. The
// block can be a whole dataset or a staged buffer; the loss never cares.
struct BatchView {
    const double* x = nullptr;  // row-major, at least (max(rows)+1) * p
    const double* y = nullptr;
    std::uint64_t p = 0;
    std::span<const std::uint32_t> rows;
};

enum class LossKind { least_squares, glm };

// Average per-sample loss with the conventions the recurrence analysis
// assumes:
//   least squares  L(theta) = (2n)^-1 sum (y_i - x_i' theta)^2
//                  (the 1/2 makes the gradient exactly Sxx theta - Sxy)
//   glm            L(theta) = -n^-1 sum { y_i x_i'theta - b(x_i'theta) }
struct LossModel {
    LossKind kind = LossKind::least_squares;
    // Cumulant function and derivatives; used when kind == glm.
    std::function<double(double)> b, bdot, bddot;
    bool is_logistic = false;
};

LossModel make_least_squares();

// Any smooth GLM through its cumulant function.
LossModel make_glm(std::function<double(double)> b, std::function<double(double)> bdot,
                   std::function<double(double)> bddot);

// Bernoulli GLM with numerically stable b(t) = log(1 + e^t): evaluated as
// max(t, 0) + log1p(e^-|t|) so large |t| neither overflows nor cancels.
LossModel make_logistic();

double value(const LossModel& model, const BatchView& batch, const numerics::Vec& theta);

// grad must have length p; overwritten.
void gradient(const LossModel& model, const BatchView& batch, const numerics::Vec& theta,
              numerics::Vec& grad);

// Batch second moments Sxx = n^-1 sum x x', Sxy = n^-1 sum x y — the
// sufficient statistics for the least-squares maps.
void batch_moments(const BatchView& batch, numerics::DenseMatrix& sxx, numerics::Vec& sxy);

// Curvature constant for the least-squares objective: the smallest
// eigenvalue of the full-sample Sxx. Gradient-dominance holds with exactly
// this constant for the quadratic loss. Throws RankError when the moment
// matrix is not positive definite.
double pl_constant_ls(const datagen::Dataset& ds);

// View over all rows of a dataset (helper for full-batch calls).
BatchView full_batch(const datagen::Dataset& ds, std::vector<std::uint32_t>& scratch_rows);

}  // namespace bmgd::losses
