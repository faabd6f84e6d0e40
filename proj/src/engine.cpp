#include "bmgd/engine.hpp"

#include <chrono>
#include <cmath>
#include <condition_variable>
#include <mutex>
#include <numeric>
#include <optional>
#include <thread>

#include "bmgd/error.hpp"
#include "bmgd/kernels.hpp"

namespace bmgd::engine {

void sgd_step(const losses::LossModel& model, const losses::BatchView& batch, double alpha,
              numerics::Vec& theta) {
    numerics::Vec grad;
    losses::gradient(model, batch, theta, grad);
    kernels::axpy(-alpha, grad.data(), theta.data(), theta.size());
}

std::uint64_t total_epochs(const BmgdConfig& cfg) {
    std::uint64_t total = 0;
    for (std::uint64_t r = 1; r <= cfg.r; ++r) total += schedule::rate(cfg.sched, r).t;
    return total;
}

namespace {

using clock_type = std::chrono::steady_clock;

double ms_between(clock_type::time_point a, clock_type::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

void sleep_ms(double ms) {
    if (ms > 0.0) std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(ms));
}

// A buffer staged in RAM, plus the virtual instant its load completes.
struct StagedBuffer {
    std::uint64_t r = 0, k = 0;
    std::vector<std::uint32_t> rows;  // surviving global rows, ascending
    std::vector<double> x, y;
    double ready_vt = 0.0;
};

struct ProducerCancelled {};

// One-slot rendezvous. The producer must see the slot empty before it
// starts the next load (that is the two-buffer memory bound), so
// wait_empty() both blocks and hands back the virtual time at which the
// consumer freed the slot — the instant the next load begins.
class BufferSlot {
public:
    double wait_empty() {
        std::unique_lock lk(mu_);
        cv_.wait(lk, [&] { return !item_.has_value() || cancelled_; });
        if (cancelled_) throw ProducerCancelled{};
        return last_pop_vt_;
    }

    void push(StagedBuffer&& b) {
        std::unique_lock lk(mu_);
        if (cancelled_) throw ProducerCancelled{};
        item_.emplace(std::move(b));
        max_occupancy_ = std::max<std::uint32_t>(max_occupancy_, 1);
        cv_.notify_all();
    }

    void close() {
        std::unique_lock lk(mu_);
        closed_ = true;
        cv_.notify_all();
    }

    void fail(std::exception_ptr e) {
        std::unique_lock lk(mu_);
        error_ = std::move(e);
        closed_ = true;
        cv_.notify_all();
    }

    // Consumer side: blocks for the next buffer. Computes and stamps the
    // consume start time max(consumer_vt, ready_vt). Returns nullopt when
    // the producer has finished and the slot is drained.
    std::optional<std::pair<StagedBuffer, double>> pop(double consumer_vt) {
        std::unique_lock lk(mu_);
        cv_.wait(lk, [&] { return item_.has_value() || closed_; });
        if (!item_.has_value()) {
            if (error_) std::rethrow_exception(error_);
            return std::nullopt;
        }
        StagedBuffer b = std::move(*item_);
        item_.reset();
        const double start = std::max(consumer_vt, b.ready_vt);
        last_pop_vt_ = start;
        cv_.notify_all();
        return std::make_pair(std::move(b), start);
    }

    void cancel() {
        std::unique_lock lk(mu_);
        cancelled_ = true;
        cv_.notify_all();
    }

    std::uint32_t max_occupancy() const {
        std::unique_lock lk(mu_);
        return max_occupancy_;
    }

private:
    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::optional<StagedBuffer> item_;
    bool cancelled_ = false;
    bool closed_ = false;
    std::exception_ptr error_;
    double last_pop_vt_ = 0.0;
    std::uint32_t max_occupancy_ = 0;
};

class Runner {
public:
    Runner(const datagen::DataSource& data, const losses::LossModel& model, const BmgdConfig& cfg,
           const CostModel& cost, const Callbacks& cb)
        : data_(data), model_(model), cfg_(cfg), cost_(cost), cb_(cb) {
        schedule::validate(cfg.sched);
        if (cfg.r == 0) throw InvalidArgumentError("engine: R must be >= 1");
        const std::uint64_t defined = schedule::defined_iterations(cfg.sched);
        if (defined != 0 && defined < cfg.r)
            throw InvalidArgumentError("engine: schedule defines " + std::to_string(defined) +
                                       " iterations but R = " + std::to_string(cfg.r));
        if (const auto* cs = std::get_if<schedule::Cosine>(&cfg.sched))
            if (cs->m != cfg.m || cs->k != cfg.k)
                throw InvalidArgumentError(
                    "engine: cosine schedule wave geometry (M, K) disagrees with the run config");
        plan_ = partition::make_plan(data.n(), cfg.k, cfg.m, cfg.mode, cfg.seed);
        p_ = data.p();
        if (cfg.init_theta.empty()) {
            theta_.assign(p_, 0.0);
        } else {
            if (cfg.init_theta.size() != p_)
                throw InvalidArgumentError("engine: init_theta length does not match dataset p");
            theta_ = cfg.init_theta;
        }
        if (cfg.record_loss && data.try_dataset() == nullptr)
            throw InvalidArgumentError(
                "engine: record_loss needs an in-memory source; use an iteration callback for "
                "file-backed runs");
        last_finite_ = theta_;
        rep_.iterates.reserve(cfg.r);
    }

    TrajectoryReport buffered() {
        const auto t0 = clock_type::now();
        if (cfg_.pipeline)
            buffered_pipelined();
        else
            buffered_sequential();
        rep_.theta = theta_;
        rep_.wall_ms = ms_between(t0, clock_type::now());
        return std::move(rep_);
    }

    TrajectoryReport unbuffered() {
        const auto t0 = clock_type::now();
        const double per_step = cost_.c1_ms + cost_.c2_ms + cost_.compute_ms;
        std::vector<double> bx;
        std::vector<double> by;
        std::vector<std::uint32_t> gathered;
        for (std::uint64_t r = 1; r <= cfg_.r; ++r) {
            const auto bufs = partition::buffers(plan_, r);
            const std::uint64_t t_r = schedule::rate(cfg_.sched, r).t;
            for (std::uint64_t k = 1; k <= cfg_.k; ++k) {
                const std::vector<std::uint32_t> rows = filtered_rows(bufs[k - 1], k);
                for (std::uint64_t t = 1; t <= t_r; ++t) {
                    const auto positions =
                        partition::minibatch_positions_sized(plan_, r, k, t, rows.size());
                    for (std::uint64_t m = 1; m <= cfg_.m; ++m) {
                        const auto& chunk = positions[m - 1];
                        if (chunk.empty()) continue;
                        // Fetch exactly this mini-batch from storage.
                        gathered.resize(chunk.size());
                        for (std::size_t i = 0; i < chunk.size(); ++i)
                            gathered[i] = rows[chunk[i]];
                        bx.resize(chunk.size() * p_);
                        by.resize(chunk.size());
                        data_.load_rows(gathered, bx.data(), by.data());
                        identity_.resize(chunk.size());
                        std::iota(identity_.begin(), identity_.end(), 0u);
                        if (cfg_.real_sleep) sleep_ms(per_step);
                        step(losses::BatchView{bx.data(), by.data(), p_, identity_},
                             rate_for(r, k, t, m, t_r));
                        ++rep_.ledger.type1_transfers;
                        rep_.ledger.sim_clock_ms += per_step;
                    }
                }
                if (cfg_.record_buffer_iterates) rep_.buffer_iterates.push_back(theta_);
            }
            end_of_iteration(r);
        }
        rep_.theta = theta_;
        rep_.wall_ms = ms_between(t0, clock_type::now());
        return std::move(rep_);
    }

private:
    double rate_for(std::uint64_t r, std::uint64_t k, std::uint64_t t, std::uint64_t m,
                    std::uint64_t t_r) const {
        const std::uint64_t j = ((k - 1) * t_r + (t - 1)) * cfg_.m + m;
        return schedule::rate(cfg_.sched, r, j).alpha;
    }

    std::vector<std::uint32_t> filtered_rows(const std::vector<std::uint32_t>& rows,
                                             std::uint64_t k) const {
        if (!cfg_.row_filter) return rows;
        std::vector<std::uint32_t> kept;
        kept.reserve(rows.size());
        for (const std::uint32_t row : rows)
            if (cfg_.row_filter(k, row)) kept.push_back(row);
        return kept;
    }

    StagedBuffer load_cell(std::uint64_t r, std::uint64_t k,
                           const std::vector<std::uint32_t>& rows) const {
        StagedBuffer b;
        b.r = r;
        b.k = k;
        b.rows = filtered_rows(rows, k);
        b.x.resize(b.rows.size() * p_);
        b.y.resize(b.rows.size());
        data_.load_rows(b.rows, b.x.data(), b.y.data());
        if (cfg_.real_sleep) sleep_ms(load_ms());
        return b;
    }

    double load_ms() const { return static_cast<double>(cfg_.m) * cost_.c1_ms; }

    // One mini-batch update against a staged block. Throws DivergenceError
    // with the last finite iterate when theta or its gradient blows up.
    void step(const losses::BatchView& batch, double alpha) {
        losses::gradient(model_, batch, theta_, grad_);
        const double gn = numerics::norm2(grad_);
        if (!std::isfinite(gn))
            throw DivergenceError("engine: mini-batch gradient is non-finite", last_finite_);
        rep_.max_gradient_norm = std::max(rep_.max_gradient_norm, gn);
        rep_.sum_step_alpha += alpha;
        last_finite_ = theta_;
        kernels::axpy(-alpha, grad_.data(), theta_.data(), theta_.size());
        if (!numerics::all_finite(theta_))
            throw DivergenceError("engine: iterate left the finite range (rate too large?)",
                                  last_finite_);
        ++rep_.ledger.type2_transfers;
        ++rep_.ledger.gradient_updates;
    }

    // T_r epochs of M mini-batch updates on a staged buffer; returns the
    // number of updates actually executed (chunks can be empty under a
    // row filter).
    std::uint64_t train_cell(const StagedBuffer& b) {
        const std::uint64_t t_r = schedule::rate(cfg_.sched, b.r).t;
        const double per_step = cost_.c2_ms + cost_.compute_ms;
        std::uint64_t executed = 0;
        for (std::uint64_t t = 1; t <= t_r; ++t) {
            const auto positions =
                partition::minibatch_positions_sized(plan_, b.r, b.k, t, b.rows.size());
            for (std::uint64_t m = 1; m <= cfg_.m; ++m) {
                const auto& chunk = positions[m - 1];
                if (chunk.empty()) continue;
                if (cfg_.real_sleep) sleep_ms(per_step);
                step(losses::BatchView{b.x.data(), b.y.data(), p_, chunk},
                     rate_for(b.r, b.k, t, m, t_r));
                ++executed;
            }
        }
        if (cfg_.record_buffer_iterates) rep_.buffer_iterates.push_back(theta_);
        return executed;
    }

    void end_of_iteration(std::uint64_t r) {
        rep_.iterates.push_back(theta_);
        double loss_value = std::numeric_limits<double>::quiet_NaN();
        if (cfg_.record_loss) {
            const datagen::Dataset* ds = data_.try_dataset();
            std::vector<std::uint32_t> all;
            loss_value = losses::value(model_, losses::full_batch(*ds, all), theta_);
            rep_.loss.push_back(loss_value);
        }
        if (cb_.on_iteration) cb_.on_iteration(IterationInfo{r, theta_, loss_value, rep_.ledger});
    }

    void buffered_sequential() {
        double vt = 0.0;
        const double per_step = cost_.c2_ms + cost_.compute_ms;
        for (std::uint64_t r = 1; r <= cfg_.r; ++r) {
            const auto bufs = partition::buffers(plan_, r);
            for (std::uint64_t k = 1; k <= cfg_.k; ++k) {
                const StagedBuffer b = load_cell(r, k, bufs[k - 1]);
                rep_.ledger.type1_transfers += cfg_.m;
                vt += load_ms();
                const std::uint64_t executed = train_cell(b);
                vt += static_cast<double>(executed) * per_step;
                rep_.ledger.sim_clock_ms = vt;
            }
            end_of_iteration(r);
        }
    }

    void buffered_pipelined() {
        BufferSlot slot;
        std::thread producer([&] {
            try {
                for (std::uint64_t r = 1; r <= cfg_.r; ++r) {
                    const auto bufs = partition::buffers(plan_, r);
                    for (std::uint64_t k = 1; k <= cfg_.k; ++k) {
                        const double start_vt = slot.wait_empty();
                        StagedBuffer b = load_cell(r, k, bufs[k - 1]);
                        b.ready_vt = start_vt + load_ms();
                        slot.push(std::move(b));
                    }
                }
                slot.close();
            } catch (const ProducerCancelled&) {
                // Consumer bailed out; nothing to report.
            } catch (...) {
                slot.fail(std::current_exception());
            }
        });

        double vt = 0.0;
        const double per_step = cost_.c2_ms + cost_.compute_ms;
        try {
            while (auto got = slot.pop(vt)) {
                StagedBuffer b = std::move(got->first);
                const double start = got->second;
                rep_.ledger.type1_transfers += cfg_.m;
                const std::uint64_t executed = train_cell(b);
                vt = start + static_cast<double>(executed) * per_step;
                rep_.ledger.sim_clock_ms = vt;
                if (b.k == cfg_.k) end_of_iteration(b.r);
            }
        } catch (...) {
            slot.cancel();
            producer.join();
            throw;
        }
        producer.join();
        rep_.max_queue_occupancy = slot.max_occupancy();
    }

    const datagen::DataSource& data_;
    const losses::LossModel& model_;
    const BmgdConfig& cfg_;
    const CostModel& cost_;
    const Callbacks& cb_;

    partition::PartitionPlan plan_;
    std::uint64_t p_ = 0;
    numerics::Vec theta_, grad_, last_finite_;
    std::vector<std::uint32_t> identity_;
    TrajectoryReport rep_;
};

}  // namespace

TrajectoryReport run_bmgd(const datagen::DataSource& data, const losses::LossModel& model,
                          const BmgdConfig& cfg, const CostModel& cost, const Callbacks& cb) {
    Runner runner(data, model, cfg, cost, cb);
    return runner.buffered();
}

TrajectoryReport run_mgd(const datagen::DataSource& data, const losses::LossModel& model,
                         const BmgdConfig& cfg, const CostModel& cost, const Callbacks& cb) {
    Runner runner(data, model, cfg, cost, cb);
    return runner.unbuffered();
}

double bmgd_pipeline_clock_model(const BmgdConfig& cfg, const CostModel& cost) {
    const double load = static_cast<double>(cfg.m) * cost.c1_ms;
    const double per_step = cost.c2_ms + cost.compute_ms;
    double start = load;  // first load is not overlapped
    double end = 0.0;
    for (std::uint64_t r = 1; r <= cfg.r; ++r) {
        const double g = static_cast<double>(schedule::rate(cfg.sched, r).t) *
                         static_cast<double>(cfg.m) * per_step;
        for (std::uint64_t k = 1; k <= cfg.k; ++k) {
            end = start + g;
            // Next buffer's load starts when this cell starts consuming.
            start = std::max(end, start + load);
        }
    }
    return end;
}

double bmgd_sequential_clock_model(const BmgdConfig& cfg, const CostModel& cost) {
    const double load = static_cast<double>(cfg.m) * cost.c1_ms;
    const double per_step = cost.c2_ms + cost.compute_ms;
    double vt = 0.0;
    for (std::uint64_t r = 1; r <= cfg.r; ++r) {
        const double g = static_cast<double>(schedule::rate(cfg.sched, r).t) *
                         static_cast<double>(cfg.m) * per_step;
        for (std::uint64_t k = 1; k <= cfg.k; ++k) vt += load + g;
    }
    return vt;
}

double mgd_clock_model(const BmgdConfig& cfg, const CostModel& cost) {
    const double per_step = cost.c1_ms + cost.c2_ms + cost.compute_ms;
    double vt = 0.0;
    for (std::uint64_t r = 1; r <= cfg.r; ++r)
        vt += static_cast<double>(schedule::rate(cfg.sched, r).t) * static_cast<double>(cfg.k) *
              static_cast<double>(cfg.m) * per_step;
    return vt;
}

}  // namespace bmgd::engine
