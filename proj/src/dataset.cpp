#include "bmgd/dataset.hpp"

#include <cmath>

#include "bmgd/error.hpp"
#include "bmgd/rng.hpp"

namespace bmgd::datagen {

namespace {

void validate(const GenConfig& cfg) {
    if (cfg.n == 0 || cfg.p == 0)
        throw InvalidArgumentError("dataset generation: n and p must be positive");
    if (!(std::abs(cfg.rho) < 1.0))
        throw InvalidArgumentError("dataset generation: need |rho| < 1, got " +
                                   std::to_string(cfg.rho));
    if (cfg.noise_sd < 0.0)
        throw InvalidArgumentError("dataset generation: noise_sd must be nonnegative");
}

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

}  // namespace

numerics::Vec ar1_row(std::uint64_t seed, std::uint64_t row, std::uint64_t p, double rho) {
    rng::Xoshiro256pp gen(rng::derive_seed(seed, {rng::kTagDesignRow, row}));
    numerics::Vec x(p);
    // Stationary AR(1) recursion: X_1 = Z_1, X_j = rho X_{j-1} + sqrt(1-rho^2) Z_j
    // gives exactly Var 1 and Cov rho^|j-k| for every p.
    const double w = std::sqrt(1.0 - rho * rho);
    x[0] = gen.normal();
    for (std::uint64_t j = 1; j < p; ++j) x[j] = rho * x[j - 1] + w * gen.normal();
    return x;
}

double ar1_quadratic_form(const numerics::Vec& v, double rho) {
    const std::size_t p = v.size();
    double q = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        q += v[j] * v[j];
        double r = rho;
        for (std::size_t k = j + 1; k < p; ++k, r *= rho) q += 2.0 * v[j] * v[k] * r;
    }
    return q;
}

numerics::Vec draw_normalized_theta(std::uint64_t seed, std::uint64_t p, double rho) {
    rng::Xoshiro256pp gen(rng::derive_seed(seed, {rng::kTagTheta}));
    numerics::Vec theta(p);
    for (double& t : theta) t = gen.normal();
    const double q = ar1_quadratic_form(theta, rho);
    if (!(q > 0.0)) throw InvalidArgumentError("draw_normalized_theta: degenerate draw");
    const double s = 1.0 / std::sqrt(q);
    for (double& t : theta) t *= s;
    return theta;
}

namespace {

std::pair<Dataset, GroundTruth> gen_common(const GenConfig& cfg, ResponseKind kind) {
    validate(cfg);
    Dataset ds;
    ds.n = cfg.n;
    ds.p = cfg.p;
    ds.kind = kind;
    ds.x.resize(cfg.n * cfg.p);
    ds.y.resize(cfg.n);

    GroundTruth truth;
    truth.theta = draw_normalized_theta(cfg.seed, cfg.p, cfg.rho);
    truth.rho = cfg.rho;
    truth.noise_sd = cfg.noise_sd;
    truth.seed = cfg.seed;
    truth.kind = kind;

    rng::Xoshiro256pp noise(rng::derive_seed(cfg.seed, {rng::kTagNoise}));
    for (std::uint64_t i = 0; i < cfg.n; ++i) {
        const numerics::Vec xi = ar1_row(cfg.seed, i, cfg.p, cfg.rho);
        std::copy(xi.begin(), xi.end(), ds.x.begin() + i * cfg.p);
        double signal = 0.0;
        for (std::uint64_t j = 0; j < cfg.p; ++j) signal += xi[j] * truth.theta[j];
        if (kind == ResponseKind::linear) {
            ds.y[i] = signal + cfg.noise_sd * noise.normal();
        } else {
            ds.y[i] = noise.uniform() < sigmoid(signal) ? 1.0 : 0.0;
        }
    }
    return {std::move(ds), std::move(truth)};
}

}  // namespace

std::pair<Dataset, GroundTruth> gen_linear_dataset(const GenConfig& cfg) {
    return gen_common(cfg, ResponseKind::linear);
}

std::pair<Dataset, GroundTruth> gen_logistic_dataset(const GenConfig& cfg) {
    return gen_common(cfg, ResponseKind::binary);
}

}  // namespace bmgd::datagen
