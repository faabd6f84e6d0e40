#include "bmgd/linsys.hpp"

#include <cmath>
#include <numeric>

#include "bmgd/error.hpp"
#include "bmgd/kernels.hpp"
#include "bmgd/loss.hpp"

namespace bmgd::linsys {

namespace {

// theta <- A theta + alpha * b, in place.
void apply_affine(const DenseMatrix& a, double alpha, const Vec& b, Vec& theta) {
    Vec next = numerics::matvec(a, theta);
    kernels::axpy(alpha, b.data(), next.data(), next.size());
    theta = std::move(next);
}

}  // namespace

std::vector<BufferOperators> build_buffer_operators(const datagen::Dataset& ds,
                                                    const partition::PartitionPlan& plan,
                                                    double alpha, std::uint64_t t_epochs) {
    if (plan.mode != partition::Mode::fixed)
        throw InvalidArgumentError(
            "buffer operators are only defined for fixed partitions; reshuffling modes change "
            "the mini-batches under the map");
    if (plan.n != ds.n) throw InvalidArgumentError("partition plan does not match the dataset");
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw InvalidArgumentError("rate must be finite and non-negative");
    if (t_epochs == 0) throw InvalidArgumentError("need at least one epoch");

    const std::size_t p = ds.p;
    const auto bufs = partition::buffers(plan, 1);

    std::vector<BufferOperators> ops;
    ops.reserve(plan.k);
    DenseMatrix sxx(p, p);
    Vec sxy(p);
    std::vector<std::uint32_t> batch_rows;
    for (std::uint64_t k = 1; k <= plan.k; ++k) {
        const auto& buffer = bufs[k - 1];
        const auto positions = partition::minibatch_positions(plan, 1, k, 1);

        BufferOperators op;
        op.a = DenseMatrix::identity(p);
        op.b.assign(p, 0.0);
        for (std::uint64_t m = 1; m <= plan.m; ++m) {
            const auto& chunk = positions[m - 1];
            batch_rows.resize(chunk.size());
            for (std::size_t i = 0; i < chunk.size(); ++i) batch_rows[i] = buffer[chunk[i]];
            losses::batch_moments(
                losses::BatchView{ds.x.data(), ds.y.data(), ds.p, batch_rows}, sxx, sxy);

            // delta = I - alpha * Sxx; fold it onto the running products:
            //   a <- delta a,   b <- delta b + Sxy
            DenseMatrix delta = DenseMatrix::identity(p);
            for (std::size_t i = 0; i < p; ++i)
                kernels::axpy(-alpha, sxx.row(i), delta.row(i), p);
            op.a = numerics::matmul(delta, op.a);
            Vec folded = numerics::matvec(delta, op.b);
            kernels::axpy(1.0, sxy.data(), folded.data(), p);
            op.b = std::move(folded);
        }

        // T epochs: c = a^T, d = b + a b + ... + a^{T-1} b (Horner).
        op.c = DenseMatrix::identity(p);
        for (std::uint64_t t = 0; t < t_epochs; ++t) op.c = numerics::matmul(op.a, op.c);
        op.d = op.b;
        for (std::uint64_t t = 1; t < t_epochs; ++t) {
            Vec next = numerics::matvec(op.a, op.d);
            kernels::axpy(1.0, op.b.data(), next.data(), p);
            op.d = std::move(next);
        }
        ops.push_back(std::move(op));
    }
    return ops;
}

StackedSystem assemble_system(const std::vector<BufferOperators>& ops) {
    if (ops.empty()) throw InvalidArgumentError("no buffer operators to stack");
    const std::uint64_t k = ops.size();
    const std::uint64_t p = ops[0].c.rows();
    for (const auto& op : ops)
        if (op.c.rows() != p || op.c.cols() != p || op.d.size() != p)
            throw InvalidArgumentError("buffer operators disagree on dimension");

    StackedSystem sys;
    sys.k = k;
    sys.p = p;
    sys.c_star = DenseMatrix(k * p, k * p);
    sys.d_star.assign(k * p, 0.0);
    for (std::uint64_t blk = 0; blk < k; ++blk) {
        // Block row blk reads from its predecessor in the cycle (block K
        // feeds block 1).
        const std::uint64_t src = (blk == 0) ? k - 1 : blk - 1;
        const auto& op = ops[blk];
        for (std::uint64_t i = 0; i < p; ++i) {
            double* dest = sys.c_star.row(blk * p + i) + src * p;
            const double* from = op.c.row(i);
            for (std::uint64_t j = 0; j < p; ++j) dest[j] = from[j];
        }
        for (std::uint64_t i = 0; i < p; ++i) sys.d_star[blk * p + i] = op.d[i];
    }
    return sys;
}

StablePoint solve_stable_point(const StackedSystem& sys, double alpha) {
    const std::uint64_t n = sys.k * sys.p;
    if (n == 0 || sys.c_star.rows() != n || sys.d_star.size() != n)
        throw InvalidArgumentError("stacked system is malformed");

    DenseMatrix omega(n, n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const double* c = sys.c_star.row(i);
        double* w = omega.row(i);
        for (std::uint64_t j = 0; j < n; ++j) w[j] = -c[j];
        w[i] += 1.0;
    }

    Vec rhs(sys.d_star);
    kernels::scale(alpha, rhs.data(), n);

    numerics::LuFactor lu(omega);
    StablePoint sol;
    sol.stacked = lu.solve_refined(rhs);
    sol.condition_estimate = lu.condition_estimate();

    // Fixed-point residual, relative to the solution scale.
    Vec image = numerics::matvec(sys.c_star, sol.stacked);
    kernels::axpy(1.0, rhs.data(), image.data(), n);
    double scale = 1.0;
    for (const double v : sol.stacked) scale = std::max(scale, std::abs(v));
    sol.residual = numerics::max_abs_diff(sol.stacked, image) / scale;

    sol.theta.assign(sol.stacked.end() - static_cast<std::ptrdiff_t>(sys.p), sol.stacked.end());
    return sol;
}

std::vector<Vec> recurrence_trajectory(const std::vector<BufferOperators>& ops, const Vec& theta0,
                                       double alpha, std::uint64_t iterations) {
    if (ops.empty()) throw InvalidArgumentError("no buffer operators");
    const std::size_t p = ops[0].c.rows();
    if (theta0.size() != p) throw InvalidArgumentError("theta0 has the wrong length");

    std::vector<Vec> iterates;
    iterates.reserve(iterations);
    Vec theta = theta0;
    for (std::uint64_t r = 0; r < iterations; ++r) {
        for (const auto& op : ops) apply_affine(op.c, alpha, op.d, theta);
        iterates.push_back(theta);
    }
    return iterates;
}

ConvergenceCertificate certify(const datagen::Dataset& ds, const StackedSystem& sys, double alpha,
                               std::uint64_t t_epochs, std::uint64_t m_batches) {
    if (t_epochs == 0 || m_batches == 0)
        throw InvalidArgumentError("epoch and batch counts must be positive");

    DenseMatrix sxx(ds.p, ds.p);
    Vec sxy;
    std::vector<std::uint32_t> scratch;
    losses::batch_moments(losses::full_batch(ds, scratch), sxx, sxy);
    const auto [lmax, lmin] = numerics::sym_eigen_extremes(sxx);

    ConvergenceCertificate cert;
    cert.lambda_min = lmin;
    cert.lambda_max = lmax;
    cert.alpha_max = 2.0 / lmax;
    const double worst = std::max(std::abs(1.0 - alpha * lmin), std::abs(1.0 - alpha * lmax));
    cert.rho_bound = std::pow(worst, static_cast<double>(t_epochs * m_batches));
    cert.rho_stacked = numerics::spectral_radius(sys.c_star).value;
    cert.cycle_rate = std::pow(cert.rho_stacked, static_cast<double>(sys.k));
    cert.contracts = cert.rho_stacked < 1.0;
    return cert;
}

double stable_ols_distance(const datagen::Dataset& ds, const StablePoint& sol) {
    DenseMatrix sxx(ds.p, ds.p);
    Vec sxy;
    std::vector<std::uint32_t> scratch;
    losses::batch_moments(losses::full_batch(ds, scratch), sxx, sxy);
    const Vec ols = numerics::spd_solve(sxx, sxy);
    return numerics::norm2(numerics::sub(sol.theta, ols));
}

}  // namespace bmgd::linsys
