#include "bmgd/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "bmgd/dataset_io.hpp"
#include "bmgd/error.hpp"
#include "bmgd/oracles.hpp"
#include "bmgd/rng.hpp"

namespace bmgd::experiment {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

// Raw key/value lines with positions, so every complaint can name its line.
struct ConfigLines {
    std::map<std::string, std::pair<std::string, int>> entries;
    std::vector<std::string> order;

    const std::string* find(const std::string& key) {
        auto it = entries.find(key);
        if (it == entries.end()) return nullptr;
        consumed.insert(key);
        return &it->second.first;
    }

    int line_of(const std::string& key) const {
        auto it = entries.find(key);
        return it == entries.end() ? 0 : it->second.second;
    }

    std::set<std::string> consumed;
};

[[noreturn]] void bad_key(const ConfigLines& cfg, const std::string& key, const std::string& why) {
    throw ConfigError("config line " + std::to_string(cfg.line_of(key)) + ": " + key + " " + why);
}

double f64_of(ConfigLines& cfg, const std::string& key, double fallback,
              bool* present = nullptr) {
    const std::string* raw = cfg.find(key);
    if (present) *present = raw != nullptr;
    if (!raw) return fallback;
    char* end = nullptr;
    const double v = std::strtod(raw->c_str(), &end);
    if (end == raw->c_str() || *end != '\0' || !std::isfinite(v))
        bad_key(cfg, key, "needs a finite number, got '" + *raw + "'");
    return v;
}

std::uint64_t u64_of(ConfigLines& cfg, const std::string& key, std::uint64_t fallback,
                     bool* present = nullptr) {
    const std::string* raw = cfg.find(key);
    if (present) *present = raw != nullptr;
    if (!raw) return fallback;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(raw->c_str(), &end, 10);
    if (end == raw->c_str() || *end != '\0' || raw->find('-') != std::string::npos)
        bad_key(cfg, key, "needs a non-negative integer, got '" + *raw + "'");
    return static_cast<std::uint64_t>(v);
}

bool bool_of(ConfigLines& cfg, const std::string& key, bool fallback) {
    const std::string* raw = cfg.find(key);
    if (!raw) return fallback;
    if (*raw == "true" || *raw == "1" || *raw == "yes") return true;
    if (*raw == "false" || *raw == "0" || *raw == "no") return false;
    bad_key(cfg, key, "needs true/false, got '" + *raw + "'");
}

double require_f64(ConfigLines& cfg, const std::string& key) {
    bool present = false;
    const double v = f64_of(cfg, key, 0.0, &present);
    if (!present) throw ConfigError("config: missing required key " + key);
    return v;
}

std::uint64_t require_u64(ConfigLines& cfg, const std::string& key) {
    bool present = false;
    const std::uint64_t v = u64_of(cfg, key, 0, &present);
    if (!present) throw ConfigError("config: missing required key " + key);
    return v;
}

schedule::Schedule parse_schedule(ConfigLines& cfg, std::uint64_t run_k, std::uint64_t run_m,
                                  std::uint64_t run_r) {
    const std::string* variant = cfg.find("sched.variant");
    if (!variant) throw ConfigError("config: missing required key sched.variant");

    if (*variant == "constant")
        return schedule::Constant{require_f64(cfg, "sched.alpha"), require_u64(cfg, "sched.t")};
    if (*variant == "pl_tuned")
        return schedule::PlTuned{require_f64(cfg, "sched.mu"), run_m, require_u64(cfg, "sched.t"),
                                 run_k, run_r};
    if (*variant == "polynomial")
        return schedule::Polynomial{require_f64(cfg, "sched.c"), require_f64(cfg, "sched.gamma"),
                                    require_u64(cfg, "sched.t")};
    if (*variant == "exponential")
        return schedule::Exponential{require_f64(cfg, "sched.c"), require_f64(cfg, "sched.gamma"),
                                     require_f64(cfg, "sched.b"), require_u64(cfg, "sched.t")};
    if (*variant == "cosine")
        return schedule::Cosine{require_f64(cfg, "sched.alpha_max"), require_u64(cfg, "sched.t"),
                                run_m, run_k};
    if (*variant == "stagewise") {
        const std::string* raw = cfg.find("sched.stages");
        if (!raw) throw ConfigError("config: missing required key sched.stages");
        schedule::StageWise sw;
        std::stringstream ss(*raw);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            double alpha = 0.0;
            unsigned long long t = 0, iters = 0;
            if (std::sscanf(item.c_str(), "%lf:%llu:%llu", &alpha, &t, &iters) != 3)
                bad_key(cfg, "sched.stages",
                        "stage '" + item + "' is not alpha:epochs:iterations");
            sw.stages.push_back(schedule::Stage{alpha, t, iters});
        }
        if (sw.stages.empty()) bad_key(cfg, "sched.stages", "lists no stages");
        return sw;
    }
    bad_key(cfg, "sched.variant", "unknown variant '" + *variant + "'");
}

}  // namespace

RunSpec parse_config_text(const std::string& text) {
    ConfigLines cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        // Keys are case-insensitive (run.K and run.k are the same knob).
        std::transform(key.begin(), key.end(), key.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": empty key or value");
        if (cfg.entries.count(key))
            throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key " + key);
        cfg.entries[key] = {value, lineno};
        cfg.order.push_back(key);
    }

    RunSpec spec;

    if (const std::string* path = cfg.find("dataset.path")) spec.dataset_path = *path;
    bool has_n = false, has_p = false;
    spec.gen.n = u64_of(cfg, "dataset.n", 0, &has_n);
    spec.gen.p = u64_of(cfg, "dataset.p", 0, &has_p);
    spec.gen.rho = f64_of(cfg, "dataset.rho", 0.0);
    spec.gen.noise_sd = f64_of(cfg, "dataset.noise_sd", 1.0);
    spec.gen.seed = u64_of(cfg, "dataset.seed", 0);
    if (const std::string* kind = cfg.find("dataset.kind")) {
        if (*kind == "linear")
            spec.kind = datagen::ResponseKind::linear;
        else if (*kind == "binary")
            spec.kind = datagen::ResponseKind::binary;
        else
            bad_key(cfg, "dataset.kind", "must be linear or binary, got '" + *kind + "'");
    }
    if (spec.dataset_path.empty() && (!has_n || !has_p))
        throw ConfigError("config: need dataset.path or both dataset.n and dataset.p");
    if (!spec.dataset_path.empty() && (has_n || has_p))
        throw ConfigError("config: dataset.path excludes the generation keys dataset.n/p");

    spec.run.k = require_u64(cfg, "run.k");
    spec.run.m = require_u64(cfg, "run.m");
    spec.run.r = require_u64(cfg, "run.r");
    spec.run.seed = u64_of(cfg, "run.seed", 0);
    spec.run.pipeline = bool_of(cfg, "run.pipeline", true);
    if (const std::string* mode = cfg.find("run.mode"))
        spec.run.mode = partition::mode_from_string(*mode);

    spec.run.sched = parse_schedule(cfg, spec.run.k, spec.run.m, spec.run.r);
    try {
        schedule::validate(spec.run.sched);
    } catch (const InvalidArgumentError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    spec.cost.c1_ms = f64_of(cfg, "cost.c1", 0.0);
    spec.cost.c2_ms = f64_of(cfg, "cost.c2", 0.0);
    spec.cost.compute_ms = f64_of(cfg, "cost.compute", 0.0);
    if (spec.cost.c1_ms < 0 || spec.cost.c2_ms < 0 || spec.cost.compute_ms < 0)
        throw ConfigError("config: cost charges must be non-negative");

    spec.replicates = static_cast<std::uint32_t>(u64_of(cfg, "rep.b", 1));
    spec.jobs = static_cast<std::uint32_t>(u64_of(cfg, "rep.jobs", 1));
    if (spec.replicates == 0 || spec.jobs == 0)
        throw ConfigError("config: rep.b and rep.jobs must be at least 1");
    if (const std::string* dir = cfg.find("out.dir")) spec.out_dir = *dir;

    for (const std::string& key : cfg.order)
        if (!cfg.consumed.count(key))
            throw ConfigError("config line " + std::to_string(cfg.line_of(key)) +
                              ": unknown key " + key);
    return spec;
}

RunSpec load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

MaterializedData materialize(const RunSpec& spec, std::uint64_t dataset_seed) {
    MaterializedData out;
    if (!spec.dataset_path.empty()) {
        out.ds = datagen::read_dataset(spec.dataset_path);
        try {
            out.truth = datagen::read_truth_sidecar(spec.dataset_path);
        } catch (const IoError&) {
            // No sidecar: run blind; squared errors come back NaN.
        }
        return out;
    }
    datagen::GenConfig gen = spec.gen;
    gen.seed = dataset_seed;
    auto [ds, truth] = spec.kind == datagen::ResponseKind::linear
                           ? datagen::gen_linear_dataset(gen)
                           : datagen::gen_logistic_dataset(gen);
    out.ds = std::move(ds);
    out.truth = std::move(truth);
    return out;
}

namespace {

double squared_distance(const numerics::Vec& a, const numerics::Vec& b) {
    const double d = numerics::norm2(numerics::sub(a, b));
    return d * d;
}

double oracle_sq_error(const datagen::Dataset& ds, const numerics::Vec& truth_theta) {
    if (ds.kind == datagen::ResponseKind::linear)
        return squared_distance(oracles::ols_fit(ds).theta, truth_theta);
    return squared_distance(oracles::logistic_mle(ds).theta, truth_theta);
}

ReplicateResult run_one_replicate(const RunSpec& spec, std::uint32_t replicate,
                                  const datagen::Dataset* shared_ds,
                                  const std::optional<datagen::GroundTruth>& shared_truth) {
    datagen::Dataset local;
    const datagen::Dataset* ds = shared_ds;
    std::optional<datagen::GroundTruth> truth = shared_truth;
    if (ds == nullptr) {
        MaterializedData mat =
            materialize(spec, rng::derive_seed(spec.gen.seed, {rng::kTagReplicate, replicate}));
        local = std::move(mat.ds);
        truth = std::move(mat.truth);
        ds = &local;
    }

    engine::BmgdConfig cfg = spec.run;
    cfg.seed = rng::derive_seed(spec.run.seed, {rng::kTagReplicate, replicate});
    cfg.record_loss = true;

    const datagen::MemorySource source(*ds);
    const losses::LossModel model = ds->kind == datagen::ResponseKind::linear
                                        ? losses::make_least_squares()
                                        : losses::make_logistic();
    engine::TrajectoryReport report = engine::run_bmgd(source, model, cfg, spec.cost);

    ReplicateResult res;
    res.replicate = replicate;
    res.final_loss = report.loss.empty() ? std::numeric_limits<double>::quiet_NaN()
                                         : report.loss.back();
    res.ledger = report.ledger;
    if (truth) {
        res.sq_error = squared_distance(report.theta, truth->theta);
        res.oracle_sq_error = oracle_sq_error(*ds, truth->theta);
    } else {
        res.sq_error = std::numeric_limits<double>::quiet_NaN();
        res.oracle_sq_error = std::numeric_limits<double>::quiet_NaN();
    }
    res.theta = std::move(report.theta);
    return res;
}

}  // namespace

ReplicateSummary replicate_experiment(const RunSpec& spec) {
    // File-backed studies reuse one in-memory copy; generated studies draw
    // a fresh dataset per replicate.
    datagen::Dataset shared;
    std::optional<datagen::GroundTruth> shared_truth;
    const datagen::Dataset* shared_ptr = nullptr;
    if (!spec.dataset_path.empty()) {
        MaterializedData mat = materialize(spec, spec.gen.seed);
        shared = std::move(mat.ds);
        shared_truth = std::move(mat.truth);
        shared_ptr = &shared;
    }

    ReplicateSummary summary;
    summary.results.resize(spec.replicates);

    const std::uint32_t workers = std::min(spec.jobs, spec.replicates);
    std::atomic<std::uint32_t> cursor{0};
    std::mutex error_mu;
    std::exception_ptr first_error;

    auto work = [&] {
        for (;;) {
            const std::uint32_t i = cursor.fetch_add(1);
            if (i >= spec.replicates) return;
            try {
                summary.results[i] = run_one_replicate(spec, i + 1, shared_ptr, shared_truth);
            } catch (...) {
                std::scoped_lock lk(error_mu);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::uint32_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    std::vector<double> errs, oracle_errs;
    errs.reserve(spec.replicates);
    oracle_errs.reserve(spec.replicates);
    double sum = 0.0, oracle_sum = 0.0;
    for (const auto& r : summary.results) {
        errs.push_back(r.sq_error);
        oracle_errs.push_back(r.oracle_sq_error);
        sum += r.sq_error;
        oracle_sum += r.oracle_sq_error;
    }
    const double n = static_cast<double>(errs.size());
    summary.mean_sq_error = sum / n;
    summary.mean_oracle_sq_error = oracle_sum / n;
    double ss = 0.0;
    for (const double e : errs) ss += (e - summary.mean_sq_error) * (e - summary.mean_sq_error);
    summary.sd_sq_error = errs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;

    // Interpolated quantiles (the definition numpy calls "linear").
    std::sort(errs.begin(), errs.end());
    std::sort(oracle_errs.begin(), oracle_errs.end());
    auto quantile = [](const std::vector<double>& sorted, double q) {
        const double pos = q * static_cast<double>(sorted.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        if (lo + 1 >= sorted.size()) return sorted.back();
        const double frac = pos - static_cast<double>(lo);
        return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
    };
    summary.q10_sq_error = quantile(errs, 0.10);
    summary.median_sq_error = quantile(errs, 0.50);
    summary.q90_sq_error = quantile(errs, 0.90);
    summary.median_oracle_sq_error = quantile(oracle_errs, 0.50);
    return summary;
}

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

constexpr const char* kTraceHeader =
    "replicate,method,alpha,T,K,M,n,iteration,mse,loss,type1,type2,sim_clock";

}  // namespace

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows) {
    out << kTraceHeader << '\n';
    for (const TraceRow& r : rows) {
        if (r.method.find(',') != std::string::npos)
            throw InvalidArgumentError("trace method name contains a comma");
        out << r.replicate << ',' << r.method << ',' << fmt_double(r.alpha) << ',' << r.t << ','
            << r.k << ',' << r.m << ',' << r.n << ',' << r.iteration << ','
            << fmt_double(r.sq_error) << ',' << fmt_double(r.loss) << ',' << r.type1 << ','
            << r.type2 << ',' << fmt_double(r.sim_clock_ms) << '\n';
    }
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
    std::string line;
    std::uint64_t offset = 0;
    if (!std::getline(in, line)) throw FormatError("trace csv: empty stream", 0);
    if (line != kTraceHeader) throw FormatError("trace csv: unexpected header", 0);
    offset += line.size() + 1;

    std::vector<TraceRow> rows;
    while (std::getline(in, line)) {
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (fields.size() != 13)
            throw FormatError("trace csv: expected 13 fields, got " +
                                  std::to_string(fields.size()),
                              offset);
        auto u = [&](int i) {
            char* end = nullptr;
            const unsigned long long v = std::strtoull(fields[i].c_str(), &end, 10);
            if (end == fields[i].c_str() || *end != '\0')
                throw FormatError("trace csv: field " + std::to_string(i + 1) +
                                      " is not an integer: '" + fields[i] + "'",
                                  offset);
            return v;
        };
        auto d = [&](int i) {
            char* end = nullptr;
            const double v = std::strtod(fields[i].c_str(), &end);
            if (end == fields[i].c_str() || *end != '\0')
                throw FormatError("trace csv: field " + std::to_string(i + 1) +
                                      " is not a number: '" + fields[i] + "'",
                                  offset);
            return v;
        };
        TraceRow r;
        r.replicate = static_cast<std::uint32_t>(u(0));
        r.method = fields[1];
        r.alpha = d(2);
        r.t = u(3);
        r.k = u(4);
        r.m = u(5);
        r.n = u(6);
        r.iteration = u(7);
        r.sq_error = d(8);
        r.loss = d(9);
        r.type1 = u(10);
        r.type2 = u(11);
        r.sim_clock_ms = d(12);
        rows.push_back(std::move(r));
        offset += line.size() + 1;
    }
    return rows;
}

TracedRun traced_run(const RunSpec& spec, const datagen::Dataset& ds,
                     const std::optional<datagen::GroundTruth>& truth,
                     const std::string& method) {
    if (method != "bmgd" && method != "mgd")
        throw InvalidArgumentError("traced_run: method must be bmgd or mgd");

    engine::BmgdConfig cfg = spec.run;
    cfg.record_loss = true;

    TracedRun out;
    engine::Callbacks cb;
    cb.on_iteration = [&](const engine::IterationInfo& info) {
        TraceRow row;
        row.replicate = 1;
        row.method = method;
        row.alpha = schedule::rate(cfg.sched, info.r).alpha;
        row.t = schedule::rate(cfg.sched, info.r).t;
        row.k = cfg.k;
        row.m = cfg.m;
        row.n = ds.n;
        row.iteration = info.r;
        row.sq_error = truth ? squared_distance(info.theta, truth->theta)
                             : std::numeric_limits<double>::quiet_NaN();
        row.loss = info.loss;
        row.type1 = info.ledger.type1_transfers;
        row.type2 = info.ledger.type2_transfers;
        row.sim_clock_ms = info.ledger.sim_clock_ms;
        out.trace.push_back(std::move(row));
    };

    const datagen::MemorySource source(ds);
    const losses::LossModel model = ds.kind == datagen::ResponseKind::linear
                                        ? losses::make_least_squares()
                                        : losses::make_logistic();
    out.report = method == "bmgd" ? engine::run_bmgd(source, model, cfg, spec.cost, cb)
                                  : engine::run_mgd(source, model, cfg, spec.cost, cb);
    return out;
}

std::string summary_json(const RunSpec& spec, const ReplicateSummary& summary) {
    json j;
    j["dataset"] = {{"path", spec.dataset_path},
                    {"n", spec.gen.n},
                    {"p", spec.gen.p},
                    {"rho", spec.gen.rho},
                    {"noise_sd", spec.gen.noise_sd},
                    {"kind", spec.kind == datagen::ResponseKind::linear ? "linear" : "binary"},
                    {"seed", spec.gen.seed}};
    j["run"] = {{"k", spec.run.k},
                {"m", spec.run.m},
                {"r", spec.run.r},
                {"mode", partition::to_string(spec.run.mode)},
                {"pipeline", spec.run.pipeline},
                {"seed", spec.run.seed}};
    j["schedule"] = schedule::variant_name(spec.run.sched);
    j["replicates"] = spec.replicates;
    j["sq_error"] = {{"mean", summary.mean_sq_error},
                     {"sd", summary.sd_sq_error},
                     {"q10", summary.q10_sq_error},
                     {"median", summary.median_sq_error},
                     {"q90", summary.q90_sq_error}};
    j["oracle_sq_error"] = {{"mean", summary.mean_oracle_sq_error},
                            {"median", summary.median_oracle_sq_error}};
    json rows = json::array();
    for (const auto& r : summary.results)
        rows.push_back({{"replicate", r.replicate},
                        {"sq_error", r.sq_error},
                        {"oracle_sq_error", r.oracle_sq_error},
                        {"final_loss", r.final_loss},
                        {"type1", r.ledger.type1_transfers},
                        {"type2", r.ledger.type2_transfers},
                        {"updates", r.ledger.gradient_updates},
                        {"sim_clock_ms", r.ledger.sim_clock_ms}});
    j["results"] = std::move(rows);
    return j.dump(2);
}

BenchReport bench_pipeline(const RunSpec& spec, const datagen::DataSource& data) {
    const losses::LossModel model = data.kind() == datagen::ResponseKind::linear
                                        ? losses::make_least_squares()
                                        : losses::make_logistic();
    BenchReport bench;

    engine::BmgdConfig cfg = spec.run;
    cfg.record_loss = false;

    cfg.pipeline = true;
    bench.pipelined = engine::run_bmgd(data, model, cfg, spec.cost);
    cfg.pipeline = false;
    bench.sequential = engine::run_bmgd(data, model, cfg, spec.cost);
    bench.unbuffered = engine::run_mgd(data, model, cfg, spec.cost);

    bench.trajectories_match = bench.pipelined.theta == bench.sequential.theta &&
                               bench.pipelined.iterates == bench.sequential.iterates;
    bench.pipeline_model_ms = engine::bmgd_pipeline_clock_model(cfg, spec.cost);
    bench.sequential_model_ms = engine::bmgd_sequential_clock_model(cfg, spec.cost);
    bench.unbuffered_model_ms = engine::mgd_clock_model(cfg, spec.cost);
    bench.clock_ratio =
        bench.pipelined.ledger.sim_clock_ms / bench.unbuffered.ledger.sim_clock_ms;
    return bench;
}

std::string bench_json(const RunSpec& spec, const BenchReport& bench) {
    // Busy fraction of the compute device over the simulated run; Type-I
    // stalls show up as this dropping.
    auto side = [&](const engine::TrajectoryReport& rep) {
        const double busy = static_cast<double>(rep.ledger.gradient_updates) *
                            spec.cost.compute_ms / rep.ledger.sim_clock_ms;
        return json{{"sim_clock_ms", rep.ledger.sim_clock_ms},
                    {"wall_ms", rep.wall_ms},
                    {"type1", rep.ledger.type1_transfers},
                    {"type2", rep.ledger.type2_transfers},
                    {"updates", rep.ledger.gradient_updates},
                    {"compute_fraction", busy},
                    {"max_queue_occupancy", rep.max_queue_occupancy}};
    };
    json j;
    j["run"] = {{"k", spec.run.k}, {"m", spec.run.m}, {"r", spec.run.r}};
    j["cost"] = {{"c1_ms", spec.cost.c1_ms},
                 {"c2_ms", spec.cost.c2_ms},
                 {"compute_ms", spec.cost.compute_ms}};
    j["buffered_pipelined"] = side(bench.pipelined);
    j["buffered_sequential"] = side(bench.sequential);
    j["unbuffered"] = side(bench.unbuffered);
    j["models_ms"] = {{"pipelined", bench.pipeline_model_ms},
                      {"sequential", bench.sequential_model_ms},
                      {"unbuffered", bench.unbuffered_model_ms}};
    j["trajectories_match"] = bench.trajectories_match;
    j["clock_ratio"] = bench.clock_ratio;
    return j.dump(2);
}

}  // namespace bmgd::experiment
