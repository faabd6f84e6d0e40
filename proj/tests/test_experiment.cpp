#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "bmgd/error.hpp"
#include "bmgd/experiment.hpp"

using namespace bmgd;
using experiment::RunSpec;

namespace {

const char* kFullConfig = R"(
# A complete study description.
dataset.n        = 96
dataset.p        = 4
dataset.rho      = 0.5
dataset.noise_sd = 0.8
dataset.kind     = linear
dataset.seed     = 11

run.K        = 2
run.M        = 3
run.R        = 6
run.mode     = fixed
run.pipeline = false
run.seed     = 3

sched.variant = constant
sched.alpha   = 0.04
sched.T       = 2

cost.c1      = 5
cost.c2      = 1
cost.compute = 0.5

rep.B    = 4
rep.jobs = 2
out.dir  = /tmp/bmgd_exp_out
)";

}  // namespace

TEST_CASE("a full config parses into the right spec") {
    const RunSpec spec = experiment::parse_config_text(kFullConfig);
    CHECK(spec.dataset_path.empty());
    CHECK(spec.gen.n == 96);
    CHECK(spec.gen.p == 4);
    CHECK(spec.gen.rho == 0.5);
    CHECK(spec.gen.noise_sd == 0.8);
    CHECK(spec.gen.seed == 11);
    CHECK(spec.kind == datagen::ResponseKind::linear);

    CHECK(spec.run.k == 2);
    CHECK(spec.run.m == 3);
    CHECK(spec.run.r == 6);
    CHECK(spec.run.mode == partition::Mode::fixed);
    CHECK_FALSE(spec.run.pipeline);
    CHECK(spec.run.seed == 3);

    const auto* constant = std::get_if<schedule::Constant>(&spec.run.sched);
    REQUIRE(constant != nullptr);
    CHECK(constant->alpha == 0.04);
    CHECK(constant->t == 2);

    CHECK(spec.cost.c1_ms == 5.0);
    CHECK(spec.cost.c2_ms == 1.0);
    CHECK(spec.cost.compute_ms == 0.5);
    CHECK(spec.replicates == 4);
    CHECK(spec.jobs == 2);
    CHECK(spec.out_dir == "/tmp/bmgd_exp_out");
}

TEST_CASE("keys are case-insensitive and defaults hold") {
    const RunSpec spec = experiment::parse_config_text(
        "DATASET.N = 32\ndataset.P = 2\nRun.k = 2\nrun.m = 2\nrun.r = 3\n"
        "sched.VARIANT = constant\nsched.alpha = 0.01\nsched.t = 1\n");
    CHECK(spec.gen.n == 32);
    CHECK(spec.run.k == 2);
    CHECK(spec.run.pipeline);  // default on
    CHECK(spec.run.mode == partition::Mode::reshuffle_per_epoch);
    CHECK(spec.replicates == 1);
    CHECK(spec.jobs == 1);
    CHECK(spec.cost.c1_ms == 0.0);
}

TEST_CASE("every schedule variant comes out of the parser intact") {
    const std::string base =
        "dataset.n = 48\ndataset.p = 2\nrun.k = 2\nrun.m = 2\nrun.r = 4\n";

    SUBCASE("pl_tuned pulls geometry from the run block") {
        const RunSpec spec = experiment::parse_config_text(
            base + "sched.variant = pl_tuned\nsched.mu = 0.7\nsched.t = 3\n");
        const auto* s = std::get_if<schedule::PlTuned>(&spec.run.sched);
        REQUIRE(s != nullptr);
        CHECK(s->mu == 0.7);
        CHECK(s->t == 3);
        CHECK(s->m == 2);
        CHECK(s->k == 2);
        CHECK(s->r == 4);
    }
    SUBCASE("polynomial") {
        const RunSpec spec = experiment::parse_config_text(
            base + "sched.variant = polynomial\nsched.c = 0.3\nsched.gamma = 0.6\nsched.t = 2\n");
        const auto* s = std::get_if<schedule::Polynomial>(&spec.run.sched);
        REQUIRE(s != nullptr);
        CHECK(s->c == 0.3);
        CHECK(s->gamma == 0.6);
        CHECK(s->t == 2);
    }
    SUBCASE("exponential") {
        const RunSpec spec = experiment::parse_config_text(
            base +
            "sched.variant = exponential\nsched.c = 0.2\nsched.gamma = 0.9\nsched.b = 2\nsched.t "
            "= 1\n");
        const auto* s = std::get_if<schedule::Exponential>(&spec.run.sched);
        REQUIRE(s != nullptr);
        CHECK(s->c == 0.2);
        CHECK(s->gamma == 0.9);
        CHECK(s->b == 2.0);
    }
    SUBCASE("stagewise parses alpha:t:iterations triples") {
        const RunSpec spec = experiment::parse_config_text(
            base + "sched.variant = stagewise\nsched.stages = 0.1:2:3, 0.01:1:2\n");
        const auto* s = std::get_if<schedule::StageWise>(&spec.run.sched);
        REQUIRE(s != nullptr);
        REQUIRE(s->stages.size() == 2);
        CHECK(s->stages[0].alpha == 0.1);
        CHECK(s->stages[0].t == 2);
        CHECK(s->stages[0].iterations == 3);
        CHECK(s->stages[1].alpha == 0.01);
        CHECK(s->stages[1].t == 1);
        CHECK(s->stages[1].iterations == 2);
    }
    SUBCASE("cosine pulls its wave geometry from the run block") {
        const RunSpec spec = experiment::parse_config_text(
            base + "sched.variant = cosine\nsched.alpha_max = 0.5\nsched.t = 2\n");
        const auto* s = std::get_if<schedule::Cosine>(&spec.run.sched);
        REQUIRE(s != nullptr);
        CHECK(s->alpha_max == 0.5);
        CHECK(s->t == 2);
        CHECK(s->m == 2);
        CHECK(s->k == 2);
    }
}

TEST_CASE("config errors carry the offending line") {
    const std::string base =
        "dataset.n = 48\ndataset.p = 2\nrun.k = 2\nrun.m = 2\nrun.r = 4\n"
        "sched.variant = constant\nsched.alpha = 0.01\nsched.t = 1\n";

    auto error_of = [](const std::string& text) {
        try {
            (void)experiment::parse_config_text(text);
            return std::string("<no error>");
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
    };

    SUBCASE("unknown key names its line") {
        const std::string msg = error_of(base + "run.warp = 9\n");
        CHECK(msg.find("run.warp") != std::string::npos);
        CHECK(msg.find("line 9") != std::string::npos);
    }
    SUBCASE("duplicate keys are rejected") {
        CHECK(error_of(base + "run.k = 3\n").find("duplicate") != std::string::npos);
    }
    SUBCASE("missing required keys are named") {
        CHECK(error_of("dataset.n = 48\ndataset.p = 2\n").find("run.k") != std::string::npos);
    }
    SUBCASE("path and generation parameters are mutually exclusive") {
        const std::string msg = error_of(base + "dataset.path = /tmp/x.bin\n");
        CHECK(msg.find("dataset.path") != std::string::npos);
    }
    SUBCASE("malformed numbers are rejected") {
        CHECK(error_of("dataset.n = twelve\n" + base) != "<no error>");
    }
    SUBCASE("bad booleans are rejected") {
        CHECK(error_of(base + "run.pipeline = maybe\n") != "<no error>");
    }
    SUBCASE("lines without an equals sign are rejected") {
        CHECK(error_of(base + "run.k\n") != "<no error>");
    }
    SUBCASE("schedule parameters are validated at parse time") {
        CHECK(error_of("dataset.n = 48\ndataset.p = 2\nrun.k = 2\nrun.m = 2\nrun.r = 4\n"
                       "sched.variant = constant\nsched.alpha = -0.1\nsched.t = 1\n") !=
              "<no error>");
    }
    SUBCASE("negative costs are rejected") {
        CHECK(error_of(base + "cost.c1 = -2\n") != "<no error>");
    }
    SUBCASE("zero replicates are rejected") {
        CHECK(error_of(base + "rep.b = 0\n") != "<no error>");
    }
    SUBCASE("unconsumed schedule keys for the wrong variant are flagged") {
        CHECK(error_of(base + "sched.gamma = 0.5\n") != "<no error>");
    }
}

TEST_CASE("trace rows survive a CSV round trip bit for bit") {
    std::vector<experiment::TraceRow> rows(3);
    rows[0] = {1, "bmgd", 0.1, 2, 3, 4, 96, 1, 0.123456789012345678, 1.5, 12, 24, 60.25};
    rows[1] = {1, "bmgd", 0.1, 2, 3, 4, 96, 2, 1e-17, 0.25, 24, 48, 120.5};
    rows[2] = {2, "mgd", std::nextafter(0.1, 1.0), 2, 3, 4, 96, 1,
               std::numeric_limits<double>::quiet_NaN(), std::nan(""), 36, 72, 181.0};

    std::stringstream ss;
    experiment::write_trace_csv(ss, rows);
    const auto back = experiment::read_trace_csv(ss);

    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back[i].replicate == rows[i].replicate);
        CHECK(back[i].method == rows[i].method);
        CHECK(back[i].alpha == rows[i].alpha);  // exact, including nextafter
        CHECK(back[i].t == rows[i].t);
        CHECK(back[i].k == rows[i].k);
        CHECK(back[i].m == rows[i].m);
        CHECK(back[i].n == rows[i].n);
        CHECK(back[i].iteration == rows[i].iteration);
        CHECK(back[i].type1 == rows[i].type1);
        CHECK(back[i].type2 == rows[i].type2);
        CHECK(back[i].sim_clock_ms == rows[i].sim_clock_ms);
    }
    CHECK(back[0].sq_error == rows[0].sq_error);
    CHECK(std::isnan(back[2].sq_error));
    CHECK(std::isnan(back[2].loss));

    // Header is part of the contract.
    std::stringstream ss2;
    experiment::write_trace_csv(ss2, {});
    std::string header;
    std::getline(ss2, header);
    CHECK(header == "replicate,method,alpha,T,K,M,n,iteration,mse,loss,type1,type2,sim_clock");
}

TEST_CASE("CSV reader rejects malformed input with an offset") {
    auto read = [](const std::string& text) {
        std::stringstream ss(text);
        return experiment::read_trace_csv(ss);
    };
    CHECK_THROWS_AS((void)read("wrong,header\n"), FormatError);
    const std::string good_header =
        "replicate,method,alpha,T,K,M,n,iteration,mse,loss,type1,type2,sim_clock\n";
    CHECK_THROWS_AS((void)read(good_header + "1,bmgd,0.1\n"), FormatError);  // short row
    CHECK_THROWS_AS((void)read(good_header + "1,bmgd,zz,1,1,1,8,1,0,0,1,1,1\n"), FormatError);
}

TEST_CASE("a traced run yields one row per iteration with cumulative charges") {
    const RunSpec spec = experiment::parse_config_text(kFullConfig);
    const auto data = experiment::materialize(spec, spec.gen.seed);
    REQUIRE(data.truth.has_value());

    const auto traced = experiment::traced_run(spec, data.ds, data.truth, "bmgd");
    REQUIRE(traced.trace.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) {
        const auto& row = traced.trace[i];
        CHECK(row.iteration == i + 1);
        CHECK(row.method == "bmgd");
        CHECK(row.alpha == 0.04);
        CHECK(row.t == 2);
        CHECK(row.k == 2);
        CHECK(row.m == 3);
        CHECK(row.n == 96);
        CHECK(std::isfinite(row.sq_error));
        CHECK(std::isfinite(row.loss));
        if (i > 0) {
            CHECK(row.type1 > traced.trace[i - 1].type1);
            CHECK(row.type2 > traced.trace[i - 1].type2);
            CHECK(row.sim_clock_ms > traced.trace[i - 1].sim_clock_ms);
        }
    }
    // Final row matches the report ledger.
    CHECK(traced.trace.back().type1 == traced.report.ledger.type1_transfers);
    CHECK(traced.trace.back().type2 == traced.report.ledger.type2_transfers);
    CHECK(traced.trace.back().sim_clock_ms == traced.report.ledger.sim_clock_ms);

    // The unbuffered method is accepted too; anything else is not.
    const auto mgd = experiment::traced_run(spec, data.ds, data.truth, "mgd");
    CHECK(mgd.trace.size() == 6);
    CHECK_THROWS_AS((void)experiment::traced_run(spec, data.ds, data.truth, "sgd"),
                    InvalidArgumentError);
}

TEST_CASE("replication is deterministic and scheduling-independent") {
    RunSpec spec = experiment::parse_config_text(kFullConfig);
    spec.replicates = 6;

    spec.jobs = 1;
    const auto serial = experiment::replicate_experiment(spec);
    spec.jobs = 4;
    const auto threaded = experiment::replicate_experiment(spec);

    REQUIRE(serial.results.size() == 6);
    REQUIRE(threaded.results.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(serial.results[i].replicate == i + 1);
        CHECK(threaded.results[i].replicate == i + 1);
        CHECK(serial.results[i].theta == threaded.results[i].theta);  // bitwise
        CHECK(serial.results[i].sq_error == threaded.results[i].sq_error);
        CHECK(serial.results[i].oracle_sq_error == threaded.results[i].oracle_sq_error);
    }
    CHECK(serial.mean_sq_error == threaded.mean_sq_error);

    // Replicates see different data: errors should not all coincide.
    bool any_differ = false;
    for (std::size_t i = 1; i < 6; ++i)
        any_differ |= serial.results[i].sq_error != serial.results[0].sq_error;
    CHECK(any_differ);
}

TEST_CASE("summary statistics match a hand computation") {
    RunSpec spec = experiment::parse_config_text(kFullConfig);
    spec.replicates = 5;
    spec.jobs = 2;
    const auto summary = experiment::replicate_experiment(spec);

    std::vector<double> errs;
    for (const auto& r : summary.results) errs.push_back(r.sq_error);
    double mean = 0.0;
    for (double e : errs) mean += e;
    mean /= 5.0;
    double var = 0.0;
    for (double e : errs) var += (e - mean) * (e - mean);
    var /= 4.0;  // sample variance

    CHECK(summary.mean_sq_error == doctest::Approx(mean).epsilon(1e-15));
    CHECK(summary.sd_sq_error == doctest::Approx(std::sqrt(var)).epsilon(1e-12));

    std::sort(errs.begin(), errs.end());
    CHECK(summary.median_sq_error == doctest::Approx(errs[2]).epsilon(1e-15));
    // Interpolated decile over five points: 0.4 of the way from the first
    // to the second order statistic.
    CHECK(summary.q10_sq_error ==
          doctest::Approx(errs[0] + 0.4 * (errs[1] - errs[0])).epsilon(1e-12));
    CHECK(summary.q90_sq_error ==
          doctest::Approx(errs[3] + 0.6 * (errs[4] - errs[3])).epsilon(1e-12));

    // JSON summary mentions the headline numbers.
    const std::string json = experiment::summary_json(spec, summary);
    CHECK(json.find("\"mean\"") != std::string::npos);
    CHECK(json.find("\"median\"") != std::string::npos);
    CHECK(json.find("\"replicates\": 5") != std::string::npos);
}

TEST_CASE("the bench harness reports matching trajectories and exact models") {
    RunSpec spec = experiment::parse_config_text(kFullConfig);
    const auto data = experiment::materialize(spec, spec.gen.seed);
    datagen::MemorySource src(data.ds);

    const auto bench = experiment::bench_pipeline(spec, src);
    CHECK(bench.trajectories_match);
    CHECK(bench.pipelined.ledger.sim_clock_ms == bench.pipeline_model_ms);
    CHECK(bench.sequential.ledger.sim_clock_ms == bench.sequential_model_ms);
    CHECK(bench.unbuffered.ledger.sim_clock_ms == bench.unbuffered_model_ms);
    CHECK(bench.clock_ratio ==
          bench.pipelined.ledger.sim_clock_ms / bench.unbuffered.ledger.sim_clock_ms);
    CHECK(bench.clock_ratio < 1.0);  // staging pays off when c1 dominates

    const std::string json = experiment::bench_json(spec, bench);
    CHECK(json.find("compute_fraction") != std::string::npos);
    CHECK(json.find("trajectories_match") != std::string::npos);
}

TEST_CASE("free staging is a wash: clock ratio pins to one when c1 is zero") {
    RunSpec spec = experiment::parse_config_text(kFullConfig);
    spec.cost.c1_ms = 0.0;
    const auto data = experiment::materialize(spec, spec.gen.seed);
    datagen::MemorySource src(data.ds);

    const auto bench = experiment::bench_pipeline(spec, src);
    // Identical per-update charges on both sides; the only difference left
    // is bookkeeping, so the ratio sits in a tight band around 1.
    CHECK(bench.clock_ratio >= 0.95);
    CHECK(bench.clock_ratio <= 1.05);
}

TEST_CASE("materialize honors files and their sidecars") {
    RunSpec spec = experiment::parse_config_text(kFullConfig);
    const auto generated = experiment::materialize(spec, 123);

    const std::string path = "/tmp/bmgd_exp_materialize.bin";
    datagen::write_dataset(path, generated.ds);

    RunSpec file_spec = spec;
    file_spec.dataset_path = path;
    const auto from_file = experiment::materialize(file_spec, 999);  // seed ignored for files
    CHECK(from_file.ds.x == generated.ds.x);
    CHECK_FALSE(from_file.truth.has_value());  // no sidecar written

    REQUIRE(generated.truth.has_value());
    datagen::write_truth_sidecar(path, *generated.truth);
    const auto with_truth = experiment::materialize(file_spec, 999);
    REQUIRE(with_truth.truth.has_value());
    CHECK(with_truth.truth->theta == generated.truth->theta);

    std::remove(path.c_str());
    std::remove((path + ".truth.json").c_str());
    CHECK_THROWS_AS((void)experiment::materialize(file_spec, 1), IoError);
}
