#pragma once

#include <functional>

#include "bmgd/dataset_io.hpp"
#include "bmgd/loss.hpp"
#include "bmgd/partition.hpp"
#include "bmgd/schedule.hpp"

namespace bmgd::engine {

// Per-mini-batch communication charges, milliseconds:
//   c1       storage -> RAM (the expensive hop)
//   c2       RAM -> compute device
//   compute  gradient work itself
struct CostModel {
    double c1_ms = 0.0;
    double c2_ms = 0.0;
    double compute_ms = 0.0;
};

struct CostLedger {
    std::uint64_t type1_transfers = 0;  // storage -> RAM, mini-batch units
    std::uint64_t type2_transfers = 0;  // RAM -> device, mini-batch units
    std::uint64_t gradient_updates = 0;
    double sim_clock_ms = 0.0;          // virtual wall clock under CostModel
};

struct BmgdConfig {
    std::uint64_t k = 1;  // buffers per pass
    std::uint64_t m = 1;  // mini-batches per buffer
    std::uint64_t r = 1;  // iterations (full passes)
    schedule::Schedule sched = schedule::Constant{0.01, 1};
    partition::Mode mode = partition::Mode::reshuffle_per_epoch;
    std::uint64_t seed = 0;
    bool pipeline = true;      // overlap next-buffer load with current compute
    bool real_sleep = false;   // sleep out the CostModel charges for real
    numerics::Vec init_theta;  // empty = start at zero

    bool record_buffer_iterates = false;  // keep theta after every (r, k) cell
    bool record_loss = false;             // full-data loss once per iteration

    // Optional row filter (undersampling hook): keep row iff it returns
    // true. Buffers shrink; mini-batches become near-equal chunks of the
    // survivors. Receives (buffer index k, global row).
    std::function<bool(std::uint64_t, std::uint32_t)> row_filter;
};

struct IterationInfo {
    std::uint64_t r;
    const numerics::Vec& theta;
    double loss;               // NaN unless record_loss
    const CostLedger& ledger;  // cumulative charges so far
};

struct Callbacks {
    std::function<void(const IterationInfo&)> on_iteration;
};

struct TrajectoryReport {
    numerics::Vec theta;                          // final estimate
    std::vector<numerics::Vec> iterates;          // theta after each iteration
    std::vector<numerics::Vec> buffer_iterates;   // R*K cells when recorded
    std::vector<double> loss;                     // per iteration when recorded
    CostLedger ledger;
    double max_gradient_norm = 0.0;
    double sum_step_alpha = 0.0;       // sum of rates over executed updates
    std::uint32_t max_queue_occupancy = 0;  // prefetch slot instrumentation
    double wall_ms = 0.0;              // real elapsed time
};

// One mini-batch descent update: theta -= alpha * grad(batch loss).
void sgd_step(const losses::LossModel& model, const losses::BatchView& batch, double alpha,
              numerics::Vec& theta);

// Buffered run: iterations sweep K staged buffers; each buffer is loaded
// once (M type-I transfers), then T_r epochs of M mini-batch updates run
// against RAM (type-II + compute charges). With pipeline on, a producer
// worker prefetches buffer k+1 while the consumer trains on buffer k
// through a one-slot rendezvous; trajectories are bit-identical either way.
// Throws DivergenceError (carrying the last finite iterate) if theta or a
// gradient leaves the finite range.
TrajectoryReport run_bmgd(const datagen::DataSource& data, const losses::LossModel& model,
                          const BmgdConfig& cfg, const CostModel& cost, const Callbacks& cb = {});

// Unbuffered baseline: the exact same update sequence (same partitions,
// same rates, bit-identical trajectory), but every mini-batch is fetched
// from storage at the moment it is consumed — each update pays type-I and
// type-II. `pipeline` is ignored.
TrajectoryReport run_mgd(const datagen::DataSource& data, const losses::LossModel& model,
                         const BmgdConfig& cfg, const CostModel& cost, const Callbacks& cb = {});

// Closed-form clock models (milliseconds) for the same configs; the
// simulated clocks above match these exactly and the bench harness reports
// both.
double bmgd_pipeline_clock_model(const BmgdConfig& cfg, const CostModel& cost);
double bmgd_sequential_clock_model(const BmgdConfig& cfg, const CostModel& cost);
double mgd_clock_model(const BmgdConfig& cfg, const CostModel& cost);

// Total epochs sum_r T_r for the configured run (used by the ledger checks).
std::uint64_t total_epochs(const BmgdConfig& cfg);

}  // namespace bmgd::engine
