#pragma once

#include <cstdint>
#include <vector>

#include "bmgd/dense.hpp"

namespace bmgd::datagen {

enum class ResponseKind : std::uint8_t { linear = 0, binary = 1 };

// Dense regression dataset: X row-major (n x p), y length n.
struct Dataset {
    std::uint64_t n = 0;
    std::uint64_t p = 0;
    ResponseKind kind = ResponseKind::linear;
    std::vector<double> x;  // n * p, row-major
    std::vector<double> y;  // n

    const double* row(std::uint64_t i) const { return x.data() + i * p; }
};

// What the generator drew, kept next to (not inside) the binary file so
// replication runs can score estimates against the truth.
struct GroundTruth {
    numerics::Vec theta;
    double rho = 0.0;
    double noise_sd = 1.0;
    std::uint64_t seed = 0;
    ResponseKind kind = ResponseKind::linear;
};

struct GenConfig {
    std::uint64_t n = 0;
    std::uint64_t p = 0;
    double rho = 0.0;       // AR(1) correlation of the design, |rho| < 1
    double noise_sd = 1.0;  // linear responses only
    std::uint64_t seed = 0;
};

// One design row with Cov(X_j, X_k) = rho^|j-k|, Var = 1, drawn from the
// row's own derived stream (rows are order-independent by construction).
numerics::Vec ar1_row(std::uint64_t seed, std::uint64_t row, std::uint64_t p, double rho);

// theta ~ N(0, I_p) from the seed's theta stream, scaled so that
// theta' Sigma theta = 1 under the analytic AR(1) covariance: the signal
// variance of x' theta is exactly 1 regardless of p and rho.
numerics::Vec draw_normalized_theta(std::uint64_t seed, std::uint64_t p, double rho);

// Analytic quadratic form v' Sigma v for the AR(1) covariance.
double ar1_quadratic_form(const numerics::Vec& v, double rho);

// y = X theta + noise_sd * eps, eps ~ N(0, 1).
std::pair<Dataset, GroundTruth> gen_linear_dataset(const GenConfig& cfg);

// y ~ Bernoulli(sigmoid(x' theta)).
std::pair<Dataset, GroundTruth> gen_logistic_dataset(const GenConfig& cfg);

}  // namespace bmgd::datagen
