#pragma once

#include <cstdint>
#include <vector>

#include "bmgd/dataset.hpp"
#include "bmgd/numerics.hpp"

// Reference fits the iterative runs are measured against: the exact
// least-squares solution, the logistic maximum-likelihood estimate, and a
// regression helper that extracts geometric decay rates from recorded
// iterate trajectories.
namespace bmgd::oracles {

using numerics::Vec;

struct OlsFit {
    Vec theta;
    double gradient_norm = 0.0;  // residual check: ||Sxx theta - Sxy||
};

// Exact minimizer of the average squared error via the normal equations
// (Cholesky on the sample moments). Throws FactorizationError when the
// moment matrix is not positive definite.
OlsFit ols_fit(const datagen::Dataset& ds);

struct MleFit {
    Vec theta;
    double gradient_norm = 0.0;
    std::uint32_t newton_steps = 0;
};

struct MleOptions {
    double gradient_tol = 1e-10;
    std::uint32_t max_newton_steps = 100;
    std::uint32_t max_halvings = 30;
    double separation_norm = 1e6;  // |theta| beyond this means separated data
};

// Logistic maximum likelihood by damped Newton (step-halving line search on
// the loss). Throws SeparationError when the iterates run off to infinity
// (perfectly separable labels have no finite MLE) and ConvergenceError if
// the gradient tolerance is not met within the step budget.
MleFit logistic_mle(const datagen::Dataset& ds, const MleOptions& opts = {});

struct DecayFit {
    double rate = 0.0;           // fitted per-index contraction factor
    double log_intercept = 0.0;  // fitted log-distance at index 0
    double r2 = 0.0;             // coefficient of determination of the line fit
    std::uint64_t points = 0;    // samples that survived the floor cut
};

// Least-squares line through (index, log ||iterate - target||): geometric
// convergence shows up as a straight line whose slope is the log decay
// rate. Points within `floor` of the target are dropped (they are rounding
// noise, not signal); needs at least three surviving points.
DecayFit fit_decay_rate(const std::vector<Vec>& iterates, const Vec& target,
                        std::uint64_t burn_in = 0, double floor = 1e-12);

}  // namespace bmgd::oracles
