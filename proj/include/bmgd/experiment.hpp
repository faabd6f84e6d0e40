#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bmgd/dataset.hpp"
#include "bmgd/engine.hpp"

// Experiment harness: a flat config-file format describing one study
// (dataset, run geometry, rate schedule, cost model, replication), runners
// that execute it, and the CSV/JSON writers the CLI prints.
namespace bmgd::experiment {

// Everything a study needs, assembled from `key = value` lines. See
// parse_config_text for the key list.
struct RunSpec {
    // Dataset: either a path to a binary file or generation parameters.
    std::string dataset_path;  // empty = generate
    datagen::GenConfig gen;
    datagen::ResponseKind kind = datagen::ResponseKind::linear;

    engine::BmgdConfig run;  // k/m/r, partition mode, pipeline, seed, schedule
    engine::CostModel cost;

    std::uint32_t replicates = 1;
    std::uint32_t jobs = 1;
    std::string out_dir;
};

// Parses the flat config format:
//
//   # comment
//   dataset.path      = runs/ar.bin      (xor the generation keys below)
//   dataset.n         = 4096
//   dataset.p         = 16
//   dataset.rho       = 0.5
//   dataset.noise_sd  = 1.0
//   dataset.kind      = linear | binary
//   dataset.seed      = 7
//   run.k / run.m / run.r                buffers, batches, iterations
//   run.mode          = fixed | reshuffle_per_iteration | reshuffle_per_epoch
//   run.pipeline      = true | false
//   run.seed          = 1
//   sched.variant     = constant | pl_tuned | polynomial | exponential
//                       | stagewise | cosine
//   sched.t           = epochs per buffer pass (all variants except stagewise)
//   sched.alpha       = rate            (constant)
//   sched.mu          = curvature       (pl_tuned; M, T, K, R come from run.*)
//   sched.c / sched.gamma / sched.b     (polynomial: c * r^-gamma;
//                                        exponential: c * gamma^(r/b))
//   sched.alpha_max   = ceiling         (cosine; wave length from run geometry)
//   sched.stages      = alpha:t:iters,alpha:t:iters,...   (stagewise)
//   cost.c1 / cost.c2 / cost.compute    per-mini-batch milliseconds
//   rep.b             = replicates
//   rep.jobs          = worker threads for replication
//   out.dir           = output directory
//
// Unknown keys, malformed values, and missing required keys all throw
// ConfigError naming the line.
RunSpec parse_config_text(const std::string& text);
RunSpec load_config(const std::string& path);  // IoError when unreadable

// Materializes the spec's dataset: generates (with the given seed override
// replacing gen.seed) or reads dataset_path. Truth is absent for files
// without a sidecar.
struct MaterializedData {
    datagen::Dataset ds;
    std::optional<datagen::GroundTruth> truth;
};
MaterializedData materialize(const RunSpec& spec, std::uint64_t dataset_seed);

struct ReplicateResult {
    std::uint32_t replicate = 0;  // 1-based
    numerics::Vec theta;
    double sq_error = 0.0;         // ||theta - truth||^2, NaN without truth
    double oracle_sq_error = 0.0;  // same for the exact fit (OLS / MLE)
    double final_loss = 0.0;
    engine::CostLedger ledger;
};

struct ReplicateSummary {
    std::vector<ReplicateResult> results;  // ordered by replicate index
    double mean_sq_error = 0.0;
    double sd_sq_error = 0.0;
    double q10_sq_error = 0.0;  // interpolated quantiles over replicates
    double median_sq_error = 0.0;
    double q90_sq_error = 0.0;
    double mean_oracle_sq_error = 0.0;
    double median_oracle_sq_error = 0.0;
};

// Runs spec.replicates independent copies of the study (fresh dataset and
// partition seeds per replicate, derived from the spec's seeds) across
// spec.jobs worker threads. Results come back ordered by replicate index
// regardless of scheduling.
ReplicateSummary replicate_experiment(const RunSpec& spec);

// One CSV row of a per-iteration trace.
struct TraceRow {
    std::uint32_t replicate = 0;
    std::string method;  // "bmgd" or "mgd"
    double alpha = 0.0;  // rate at the iteration's first update
    std::uint64_t t = 0, k = 0, m = 0, n = 0;
    std::uint64_t iteration = 0;
    double sq_error = 0.0;  // NaN without truth
    double loss = 0.0;      // NaN unless recorded
    std::uint64_t type1 = 0, type2 = 0;
    double sim_clock_ms = 0.0;
};

// Doubles are printed with enough digits to round-trip exactly.
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows);
std::vector<TraceRow> read_trace_csv(std::istream& in);

// Single run with a per-iteration trace (and squared error when truth is
// known). `method` selects run_bmgd ("bmgd") or run_mgd ("mgd").
struct TracedRun {
    engine::TrajectoryReport report;
    std::vector<TraceRow> trace;
};
TracedRun traced_run(const RunSpec& spec, const datagen::Dataset& ds,
                     const std::optional<datagen::GroundTruth>& truth,
                     const std::string& method);

std::string summary_json(const RunSpec& spec, const ReplicateSummary& summary);

// Buffered-vs-unbuffered cost comparison on one dataset: runs the buffered
// loop pipelined and sequential (asserting the two trajectories are
// bit-identical), the unbuffered baseline, and reports simulated clocks
// next to their closed-form models plus real wall time.
struct BenchReport {
    engine::TrajectoryReport pipelined;
    engine::TrajectoryReport sequential;
    engine::TrajectoryReport unbuffered;
    double pipeline_model_ms = 0.0;
    double sequential_model_ms = 0.0;
    double unbuffered_model_ms = 0.0;
    bool trajectories_match = false;  // pipelined vs sequential, bitwise
    double clock_ratio = 0.0;         // pipelined sim clock / unbuffered sim clock
};
BenchReport bench_pipeline(const RunSpec& spec, const datagen::DataSource& data);
std::string bench_json(const RunSpec& spec, const BenchReport& bench);

}  // namespace bmgd::experiment
