#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bmgd/dataset.hpp"
#include "bmgd/error.hpp"
#include "bmgd/oracles.hpp"

using namespace bmgd;

TEST_CASE("generation is deterministic and seed-sensitive") {
    datagen::GenConfig cfg{256, 6, 0.4, 1.0, 99};
    const auto [a, ta] = datagen::gen_linear_dataset(cfg);
    const auto [b, tb] = datagen::gen_linear_dataset(cfg);
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);
    CHECK(ta.theta == tb.theta);

    cfg.seed = 100;
    const auto [c, tc] = datagen::gen_linear_dataset(cfg);
    CHECK(a.x != c.x);
    CHECK(ta.theta != tc.theta);
}

TEST_CASE("rows are derived independently of one another") {
    // Row 5's stream must not depend on whether rows 0..4 were computed.
    const numerics::Vec direct = datagen::ar1_row(42, 5, 8, 0.6);
    for (std::uint64_t r = 0; r < 5; ++r) (void)datagen::ar1_row(42, r, 8, 0.6);
    const numerics::Vec again = datagen::ar1_row(42, 5, 8, 0.6);
    CHECK(direct == again);
}

TEST_CASE("independent design: sample moments near identity") {
    const std::uint64_t n = 4096, p = 5;
    const auto [ds, truth] = datagen::gen_linear_dataset({n, p, 0.0, 1.0, 3});
    // Sample covariance entries: sd ~ 1/sqrt(n) ~ 0.016.
    for (std::uint64_t j = 0; j < p; ++j)
        for (std::uint64_t k = 0; k < p; ++k) {
            double acc = 0.0;
            for (std::uint64_t i = 0; i < n; ++i) acc += ds.x[i * p + j] * ds.x[i * p + k];
            acc /= static_cast<double>(n);
            const double want = j == k ? 1.0 : 0.0;
            CHECK(std::abs(acc - want) < 0.07);
        }
}

TEST_CASE("signal variance is exactly one by construction") {
    for (const double rho : {0.0, 0.5, 0.9, -0.7}) {
        for (const std::uint64_t p : {1ull, 3ull, 16ull}) {
            const numerics::Vec theta = datagen::draw_normalized_theta(17, p, rho);
            CHECK(std::abs(datagen::ar1_quadratic_form(theta, rho) - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("quadratic form matches brute force") {
    const numerics::Vec v{0.3, -1.2, 0.7, 2.0};
    const double rho = 0.45;
    double brute = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) brute += v[i] * v[j] * std::pow(rho, std::abs(i - j));
    CHECK(datagen::ar1_quadratic_form(v, rho) == doctest::Approx(brute).epsilon(1e-13));
}

TEST_CASE("noiseless responses recover theta exactly") {
    const auto [ds, truth] = datagen::gen_linear_dataset({512, 7, 0.5, 0.0, 21});
    const auto fit = oracles::ols_fit(ds);
    CHECK(numerics::max_abs_diff(fit.theta, truth.theta) < 1e-10);
    CHECK(fit.gradient_norm < 1e-12);
}

TEST_CASE("noisy responses: estimator error shrinks like 1/n") {
    const auto [small_ds, t1] = datagen::gen_linear_dataset({256, 4, 0.3, 1.0, 8});
    const auto [large_ds, t2] = datagen::gen_linear_dataset({16384, 4, 0.3, 1.0, 8});
    const double small_err =
        numerics::norm2(numerics::sub(oracles::ols_fit(small_ds).theta, t1.theta));
    const double large_err =
        numerics::norm2(numerics::sub(oracles::ols_fit(large_ds).theta, t2.theta));
    CHECK(large_err < small_err);  // 64x the data; any sane draw satisfies this
}

TEST_CASE("binary responses look like fair coin at zero signal margin") {
    const auto [ds, truth] = datagen::gen_logistic_dataset({8192, 6, 0.5, 1.0, 13});
    double ones = 0.0;
    for (const double y : ds.y) {
        const bool binary = y == 0.0 || y == 1.0;
        CHECK(binary);
        ones += y;
    }
    // Signal x'theta ~ N(0,1) symmetric, so P(y=1) averages to 1/2.
    CHECK(std::abs(ones / static_cast<double>(ds.n) - 0.5) < 0.02);
    CHECK(ds.kind == datagen::ResponseKind::binary);
    CHECK(truth.kind == datagen::ResponseKind::binary);
}

TEST_CASE("generator rejects bad parameters") {
    CHECK_THROWS_AS((void)datagen::gen_linear_dataset({0, 4, 0.0, 1.0, 1}), InvalidArgumentError);
    CHECK_THROWS_AS((void)datagen::gen_linear_dataset({16, 0, 0.0, 1.0, 1}),
                    InvalidArgumentError);
    CHECK_THROWS_AS((void)datagen::gen_linear_dataset({16, 4, 1.0, 1.0, 1}),
                    InvalidArgumentError);
    CHECK_THROWS_AS((void)datagen::gen_linear_dataset({16, 4, -1.5, 1.0, 1}),
                    InvalidArgumentError);
    CHECK_THROWS_AS((void)datagen::gen_linear_dataset({16, 4, 0.0, -0.1, 1}),
                    InvalidArgumentError);
}

TEST_CASE("truth metadata reflects the generating configuration") {
    const auto [ds, truth] = datagen::gen_linear_dataset({64, 3, 0.25, 0.5, 777});
    CHECK(truth.rho == 0.25);
    CHECK(truth.noise_sd == 0.5);
    CHECK(truth.seed == 777);
    CHECK(truth.theta.size() == 3);
    CHECK(ds.row(0) == ds.x.data());
    CHECK(ds.row(63) == ds.x.data() + 63 * 3);
}
