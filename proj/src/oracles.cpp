#include "bmgd/oracles.hpp"

#include <cmath>

#include "bmgd/error.hpp"
#include "bmgd/kernels.hpp"
#include "bmgd/loss.hpp"

namespace bmgd::oracles {

OlsFit ols_fit(const datagen::Dataset& ds) {
    if (ds.kind != datagen::ResponseKind::linear)
        throw InvalidArgumentError("ols_fit expects a linear-response dataset");
    numerics::DenseMatrix sxx;
    Vec sxy;
    std::vector<std::uint32_t> scratch;
    losses::batch_moments(losses::full_batch(ds, scratch), sxx, sxy);

    OlsFit fit;
    fit.theta = numerics::spd_solve(sxx, sxy);
    Vec residual = numerics::matvec(sxx, fit.theta);
    kernels::axpy(-1.0, sxy.data(), residual.data(), residual.size());
    fit.gradient_norm = numerics::norm2(residual);
    return fit;
}

MleFit logistic_mle(const datagen::Dataset& ds, const MleOptions& opts) {
    if (ds.kind != datagen::ResponseKind::binary)
        throw InvalidArgumentError("logistic_mle expects a binary-response dataset");
    const std::uint64_t p = ds.p;
    const losses::LossModel model = losses::make_logistic();
    std::vector<std::uint32_t> scratch;
    const losses::BatchView batch = losses::full_batch(ds, scratch);
    const double inv_n = 1.0 / static_cast<double>(ds.n);

    MleFit fit;
    fit.theta.assign(p, 0.0);
    Vec grad;
    numerics::DenseMatrix hess(p, p);
    double loss = losses::value(model, batch, fit.theta);

    for (std::uint32_t it = 0; it < opts.max_newton_steps; ++it) {
        losses::gradient(model, batch, fit.theta, grad);
        fit.gradient_norm = numerics::norm2(grad);
        if (fit.gradient_norm <= opts.gradient_tol) return fit;

        // Hessian: n^-1 sum b''(x'theta) x x'.
        hess = numerics::DenseMatrix(p, p);
        for (std::uint32_t r = 0; r < ds.n; ++r) {
            const double* x = ds.x.data() + static_cast<std::uint64_t>(r) * p;
            const double t = kernels::dot(x, fit.theta.data(), p);
            numerics::rank1_update(hess, inv_n * model.bddot(t), x, x);
        }
        for (std::uint64_t i = 0; i < p; ++i)
            for (std::uint64_t j = i + 1; j < p; ++j) {
                const double m = 0.5 * (hess(i, j) + hess(j, i));
                hess(i, j) = hess(j, i) = m;
            }
        Vec direction;
        try {
            direction = numerics::spd_solve(hess, grad);
        } catch (const FactorizationError&) {
            // Curvature underflowed. With a zero start that only happens
            // when the iterate has run deep into a tail direction the
            // likelihood keeps rewarding — the separation signature. At
            // the origin it means the design itself is rank deficient, so
            // let that surface unchanged.
            if (numerics::norm2(fit.theta) > std::min(1e3, opts.separation_norm))
                throw SeparationError(
                    "logistic_mle: curvature vanished along the iterate's path; the labels look "
                    "(quasi-)separable and the MLE does not exist");
            throw;
        }

        // Backtrack until the loss actually drops.
        double step = 1.0;
        bool accepted = false;
        Vec candidate(p);
        for (std::uint32_t h = 0; h <= opts.max_halvings; ++h, step *= 0.5) {
            candidate = fit.theta;
            kernels::axpy(-step, direction.data(), candidate.data(), p);
            const double cand_loss = losses::value(model, batch, candidate);
            if (std::isfinite(cand_loss) && cand_loss < loss) {
                fit.theta = std::move(candidate);
                loss = cand_loss;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // Near the optimum the true decrease can sink below the
            // summation noise of the loss evaluation while the Newton step
            // is still contracting. Accept the full step on gradient
            // progress alone in that endgame.
            candidate = fit.theta;
            kernels::axpy(-1.0, direction.data(), candidate.data(), p);
            const double cand_loss = losses::value(model, batch, candidate);
            Vec cand_grad;
            losses::gradient(model, batch, candidate, cand_grad);
            if (std::isfinite(cand_loss) && numerics::norm2(cand_grad) < 0.5 * fit.gradient_norm) {
                fit.theta = std::move(candidate);
                loss = cand_loss;
                accepted = true;
            }
        }
        ++fit.newton_steps;
        if (!accepted)
            throw ConvergenceError("logistic_mle: line search stalled at gradient norm " +
                                       std::to_string(fit.gradient_norm),
                                   fit.gradient_norm);
        if (numerics::norm2(fit.theta) > opts.separation_norm)
            throw SeparationError(
                "logistic_mle: estimate norm exceeded " + std::to_string(opts.separation_norm) +
                "; the labels look (quasi-)separable and the MLE does not exist");
    }
    losses::gradient(model, batch, fit.theta, grad);
    fit.gradient_norm = numerics::norm2(grad);
    if (fit.gradient_norm <= opts.gradient_tol) return fit;
    throw ConvergenceError("logistic_mle: gradient norm " + std::to_string(fit.gradient_norm) +
                               " after " + std::to_string(opts.max_newton_steps) + " Newton steps",
                           fit.gradient_norm);
}

DecayFit fit_decay_rate(const std::vector<Vec>& iterates, const Vec& target, std::uint64_t burn_in,
                        double floor) {
    std::vector<double> xs, ys;
    xs.reserve(iterates.size());
    ys.reserve(iterates.size());
    for (std::size_t i = burn_in; i < iterates.size(); ++i) {
        if (iterates[i].size() != target.size())
            throw InvalidArgumentError("fit_decay_rate: iterate/target length mismatch");
        const double d = numerics::norm2(numerics::sub(iterates[i], target));
        if (d <= floor) break;  // converged to rounding noise; later points are flat
        xs.push_back(static_cast<double>(i));
        ys.push_back(std::log(d));
    }
    if (xs.size() < 3)
        throw InvalidArgumentError("fit_decay_rate: fewer than three usable points above the "
                                   "distance floor");

    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
        syy += ys[i] * ys[i];
    }
    const double var_x = sxx - sx * sx / n;
    const double cov = sxy - sx * sy / n;
    const double var_y = syy - sy * sy / n;
    if (var_x <= 0.0) throw InvalidArgumentError("fit_decay_rate: degenerate index range");

    DecayFit fit;
    const double slope = cov / var_x;
    fit.rate = std::exp(slope);
    fit.log_intercept = (sy - slope * sx) / n;
    fit.r2 = var_y > 0.0 ? (cov * cov) / (var_x * var_y) : 1.0;
    fit.points = xs.size();
    return fit;
}

}  // namespace bmgd::oracles
