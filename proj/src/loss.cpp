#include "bmgd/loss.hpp"

#include <cmath>
#include <numeric>

#include "bmgd/error.hpp"
#include "bmgd/kernels.hpp"
#include "bmgd/numerics.hpp"

namespace bmgd::losses {

namespace {

void check_batch(const BatchView& batch, const numerics::Vec& theta, const char* who) {
    if (batch.rows.empty()) throw InvalidArgumentError(std::string(who) + ": empty batch");
    if (batch.p == 0 || theta.size() != batch.p)
        throw InvalidArgumentError(std::string(who) + ": theta length " +
                                   std::to_string(theta.size()) + " does not match p = " +
                                   std::to_string(batch.p));
    if (batch.x == nullptr || batch.y == nullptr)
        throw InvalidArgumentError(std::string(who) + ": null batch storage");
}

void check_glm(const LossModel& model, const char* who) {
    if (!model.b || !model.bdot || !model.bddot)
        throw InvalidArgumentError(std::string(who) + ": glm model is missing b / b' / b''");
}

double stable_sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

}  // namespace

LossModel make_least_squares() { return LossModel{LossKind::least_squares, {}, {}, {}, false}; }

LossModel make_glm(std::function<double(double)> b, std::function<double(double)> bdot,
                   std::function<double(double)> bddot) {
    LossModel m;
    m.kind = LossKind::glm;
    m.b = std::move(b);
    m.bdot = std::move(bdot);
    m.bddot = std::move(bddot);
    check_glm(m, "make_glm");
    return m;
}

LossModel make_logistic() {
    LossModel m = make_glm(
        [](double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); },
        [](double t) { return stable_sigmoid(t); },
        [](double t) {
            const double s = stable_sigmoid(t);
            return s * (1.0 - s);
        });
    m.is_logistic = true;
    return m;
}

double value(const LossModel& model, const BatchView& batch, const numerics::Vec& theta) {
    check_batch(batch, theta, "loss value");
    const double inv_n = 1.0 / static_cast<double>(batch.rows.size());
    double acc = 0.0;
    if (model.kind == LossKind::least_squares) {
        for (const std::uint32_t r : batch.rows) {
            const double t = kernels::dot(batch.x + static_cast<std::uint64_t>(r) * batch.p,
                                          theta.data(), batch.p);
            const double d = batch.y[r] - t;
            acc += d * d;
        }
        return 0.5 * inv_n * acc;
    }
    check_glm(model, "loss value");
    for (const std::uint32_t r : batch.rows) {
        const double t = kernels::dot(batch.x + static_cast<std::uint64_t>(r) * batch.p,
                                      theta.data(), batch.p);
        acc += batch.y[r] * t - model.b(t);
    }
    return -inv_n * acc;
}

void gradient(const LossModel& model, const BatchView& batch, const numerics::Vec& theta,
              numerics::Vec& grad) {
    check_batch(batch, theta, "loss gradient");
    grad.assign(batch.p, 0.0);
    const double inv_n = 1.0 / static_cast<double>(batch.rows.size());
    if (model.kind == LossKind::glm) check_glm(model, "loss gradient");
    for (const std::uint32_t r : batch.rows) {
        const double* x = batch.x + static_cast<std::uint64_t>(r) * batch.p;
        const double t = kernels::dot(x, theta.data(), batch.p);
        // Per-sample weight: residual for least squares, mean mismatch for
        // the GLM family.
        const double c = model.kind == LossKind::least_squares ? (t - batch.y[r])
                                                               : (model.bdot(t) - batch.y[r]);
        kernels::axpy(c * inv_n, x, grad.data(), batch.p);
    }
}

void batch_moments(const BatchView& batch, numerics::DenseMatrix& sxx, numerics::Vec& sxy) {
    if (batch.rows.empty()) throw InvalidArgumentError("batch_moments: empty batch");
    const std::uint64_t p = batch.p;
    sxx = numerics::DenseMatrix(p, p);
    sxy.assign(p, 0.0);
    const double inv_n = 1.0 / static_cast<double>(batch.rows.size());
    for (const std::uint32_t r : batch.rows) {
        const double* x = batch.x + static_cast<std::uint64_t>(r) * p;
        numerics::rank1_update(sxx, inv_n, x, x);
        kernels::axpy(inv_n * batch.y[r], x, sxy.data(), p);
    }
    // The rank-1 updates are symmetric up to rounding; make it exact so the
    // factorizations downstream never see spurious asymmetry.
    for (std::uint64_t i = 0; i < p; ++i)
        for (std::uint64_t j = i + 1; j < p; ++j) {
            const double m = 0.5 * (sxx(i, j) + sxx(j, i));
            sxx(i, j) = sxx(j, i) = m;
        }
}

double pl_constant_ls(const datagen::Dataset& ds) {
    std::vector<std::uint32_t> rows;
    const BatchView batch = full_batch(ds, rows);
    numerics::DenseMatrix sxx;
    numerics::Vec sxy;
    batch_moments(batch, sxx, sxy);
    const auto [lmax, lmin] = numerics::sym_eigen_extremes(sxx);
    (void)lmax;
    if (!(lmin > 0.0))
        throw RankError("pl_constant_ls: sample moment matrix is rank deficient (lambda_min = " +
                        std::to_string(lmin) + ")");
    return lmin;
}

BatchView full_batch(const datagen::Dataset& ds, std::vector<std::uint32_t>& scratch_rows) {
    scratch_rows.resize(ds.n);
    std::iota(scratch_rows.begin(), scratch_rows.end(), 0u);
    return BatchView{ds.x.data(), ds.y.data(), ds.p, scratch_rows};
}

}  // namespace bmgd::losses
