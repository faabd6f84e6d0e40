// Command-line front end: dataset generation, single runs with CSV traces,
// replicated studies, closed-form analysis of the fixed-partition system,
// and the buffered-vs-unbuffered cost bench.
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <json.hpp>

#include "bmgd/dataset_io.hpp"
#include "bmgd/engine.hpp"
#include "bmgd/error.hpp"
#include "bmgd/experiment.hpp"
#include "bmgd/kernels.hpp"
#include "bmgd/linsys.hpp"
#include "bmgd/oracles.hpp"

namespace {

using nlohmann::json;

// Exit codes: 0 ok, 2 bad config/arguments, 3 diverged, 4 file trouble,
// 5 other library failure, 1 anything unexpected.
int guarded(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const bmgd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const bmgd::InvalidArgumentError& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return 2;
    } catch (const bmgd::DivergenceError& e) {
        std::cerr << "diverged: " << e.what() << '\n';
        return 3;
    } catch (const bmgd::FormatError& e) {
        std::cerr << "bad file: " << e.what() << '\n';
        return 4;
    } catch (const bmgd::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 4;
    } catch (const bmgd::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << '\n';
        return 1;
    }
}

json ledger_json(const bmgd::engine::CostLedger& ledger) {
    return {{"type1", ledger.type1_transfers},
            {"type2", ledger.type2_transfers},
            {"updates", ledger.gradient_updates},
            {"sim_clock_ms", ledger.sim_clock_ms}};
}

void cmd_gen(const std::string& out, std::uint64_t n, std::uint64_t p, double rho,
             double noise_sd, const std::string& kind, std::uint64_t seed) {
    bmgd::datagen::GenConfig cfg{n, p, rho, noise_sd, seed};
    auto [ds, truth] = kind == "binary" ? bmgd::datagen::gen_logistic_dataset(cfg)
                                        : bmgd::datagen::gen_linear_dataset(cfg);
    bmgd::datagen::write_dataset(out, ds);
    bmgd::datagen::write_truth_sidecar(out, truth);
    json j{{"path", out},       {"n", n},          {"p", p},
           {"rho", rho},        {"kind", kind},    {"noise_sd", noise_sd},
           {"seed", seed},      {"bytes", std::filesystem::file_size(out)}};
    std::cout << j.dump(2) << '\n';
}

void cmd_run(const std::string& config_path, const std::string& method,
             const std::string& out_csv, bool real_sleep, bool no_pipeline) {
    bmgd::experiment::RunSpec spec = bmgd::experiment::load_config(config_path);
    spec.run.real_sleep = real_sleep;
    if (no_pipeline) spec.run.pipeline = false;

    bmgd::experiment::MaterializedData data =
        bmgd::experiment::materialize(spec, spec.gen.seed);
    bmgd::experiment::TracedRun run =
        bmgd::experiment::traced_run(spec, data.ds, data.truth, method);

    if (!out_csv.empty()) {
        std::ofstream out(out_csv);
        if (!out) throw bmgd::IoError("cannot write " + out_csv);
        bmgd::experiment::write_trace_csv(out, run.trace);
    }

    json j;
    j["method"] = method;
    j["iterations"] = run.report.iterates.size();
    j["final_loss"] = run.report.loss.empty() ? json() : json(run.report.loss.back());
    if (!run.trace.empty()) j["final_sq_error"] = run.trace.back().sq_error;
    j["ledger"] = ledger_json(run.report.ledger);
    j["max_queue_occupancy"] = run.report.max_queue_occupancy;
    j["wall_ms"] = run.report.wall_ms;
    j["kernel_lane"] = std::string(bmgd::kernels::active_lane());
    if (!out_csv.empty()) j["trace_csv"] = out_csv;
    std::cout << j.dump(2) << '\n';
}

void cmd_replicate(const std::string& config_path, std::uint32_t jobs_override) {
    bmgd::experiment::RunSpec spec = bmgd::experiment::load_config(config_path);
    if (jobs_override > 0) spec.jobs = jobs_override;
    const bmgd::experiment::ReplicateSummary summary =
        bmgd::experiment::replicate_experiment(spec);
    const std::string text = bmgd::experiment::summary_json(spec, summary);
    if (!spec.out_dir.empty()) {
        std::filesystem::create_directories(spec.out_dir);
        const auto path = std::filesystem::path(spec.out_dir) / "summary.json";
        std::ofstream out(path);
        if (!out) throw bmgd::IoError("cannot write " + path.string());
        out << text << '\n';
    }
    std::cout << text << '\n';
}

void cmd_analyze(const std::string& config_path) {
    bmgd::experiment::RunSpec spec = bmgd::experiment::load_config(config_path);
    const auto* constant = std::get_if<bmgd::schedule::Constant>(&spec.run.sched);
    if (!constant)
        throw bmgd::ConfigError("analyze needs sched.variant = constant");
    if (spec.run.mode != bmgd::partition::Mode::fixed)
        throw bmgd::ConfigError("analyze needs run.mode = fixed");
    if (spec.kind != bmgd::datagen::ResponseKind::linear)
        throw bmgd::ConfigError("analyze covers the least-squares loss only");

    bmgd::experiment::MaterializedData data =
        bmgd::experiment::materialize(spec, spec.gen.seed);
    const auto plan = bmgd::partition::make_plan(data.ds.n, spec.run.k, spec.run.m,
                                                 spec.run.mode, spec.run.seed);
    const auto ops =
        bmgd::linsys::build_buffer_operators(data.ds, plan, constant->alpha, constant->t);
    const auto sys = bmgd::linsys::assemble_system(ops);
    const auto stable = bmgd::linsys::solve_stable_point(sys, constant->alpha);
    const auto cert =
        bmgd::linsys::certify(data.ds, sys, constant->alpha, constant->t, spec.run.m);

    // Replay the same run through the engine and through the operator
    // recurrence; on fixed partitions they should agree to roundoff.
    bmgd::experiment::TracedRun run =
        bmgd::experiment::traced_run(spec, data.ds, data.truth, "bmgd");
    const auto recurrence = bmgd::linsys::recurrence_trajectory(
        ops, bmgd::numerics::Vec(data.ds.p, 0.0), constant->alpha, spec.run.r);
    double max_gap = 0.0;
    for (std::size_t r = 0; r < recurrence.size(); ++r)
        max_gap = std::max(
            max_gap, bmgd::numerics::max_abs_diff(run.report.iterates[r], recurrence[r]));

    json j;
    j["stable_point"] = {{"residual", stable.residual},
                         {"condition_estimate", stable.condition_estimate}};
    j["certificate"] = {{"lambda_min", cert.lambda_min},   {"lambda_max", cert.lambda_max},
                        {"alpha_max", cert.alpha_max},     {"rho_bound", cert.rho_bound},
                        {"rho_stacked", cert.rho_stacked}, {"cycle_rate", cert.cycle_rate},
                        {"contracts", cert.contracts}};
    j["ols_distance"] = bmgd::linsys::stable_ols_distance(data.ds, stable);
    j["engine_vs_recurrence_max_diff"] = max_gap;
    try {
        const auto decay =
            bmgd::oracles::fit_decay_rate(run.report.iterates, stable.theta, spec.run.r / 10);
        const double fitted_root =
            std::pow(decay.rate, 1.0 / static_cast<double>(spec.run.k));
        j["decay"] = {{"fitted_cycle_rate", decay.rate},
                      {"fitted_stacked_rate", fitted_root},
                      {"r2", decay.r2},
                      {"points", decay.points},
                      {"relative_gap_vs_rho",
                       std::abs(fitted_root - cert.rho_stacked) / cert.rho_stacked}};
    } catch (const bmgd::InvalidArgumentError& e) {
        j["decay"] = {{"unavailable", e.what()}};
    }
    std::cout << j.dump(2) << '\n';
}

void cmd_bench(const std::string& config_path, bool real_sleep) {
    bmgd::experiment::RunSpec spec = bmgd::experiment::load_config(config_path);
    spec.run.real_sleep = real_sleep;

    // File-backed benches actually stream from disk; generated ones serve
    // from memory.
    std::unique_ptr<bmgd::datagen::DataSource> source;
    bmgd::datagen::Dataset generated;
    if (!spec.dataset_path.empty()) {
        source = std::make_unique<bmgd::datagen::FileSource>(spec.dataset_path);
    } else {
        generated = bmgd::experiment::materialize(spec, spec.gen.seed).ds;
        source = std::make_unique<bmgd::datagen::MemorySource>(generated);
    }
    const auto bench = bmgd::experiment::bench_pipeline(spec, *source);
    std::cout << bmgd::experiment::bench_json(spec, bench) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Buffered mini-batch gradient descent: runs, studies, analysis"};
    app.require_subcommand(1);
    int exit_code = 0;

    // gen ------------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "Generate a dataset file (+ truth sidecar)");
    std::string gen_out, gen_kind = "linear";
    std::uint64_t gen_n = 0, gen_p = 0, gen_seed = 0;
    double gen_rho = 0.0, gen_noise = 1.0;
    gen->add_option("--out", gen_out, "output path")->required();
    gen->add_option("--n", gen_n, "rows")->required();
    gen->add_option("--p", gen_p, "columns")->required();
    gen->add_option("--rho", gen_rho, "AR(1) design correlation");
    gen->add_option("--noise-sd", gen_noise, "noise scale (linear responses)");
    gen->add_option("--kind", gen_kind, "linear | binary")
        ->check(CLI::IsMember({"linear", "binary"}));
    gen->add_option("--seed", gen_seed, "generation seed");
    gen->callback([&] {
        exit_code =
            guarded([&] { cmd_gen(gen_out, gen_n, gen_p, gen_rho, gen_noise, gen_kind, gen_seed); });
    });

    // run ------------------------------------------------------------
    auto* run = app.add_subcommand("run", "One run with a per-iteration trace");
    std::string run_config, run_method = "bmgd", run_csv;
    bool run_real_sleep = false, run_no_pipeline = false;
    run->add_option("--config", run_config, "config file")->required();
    run->add_option("--method", run_method, "bmgd | mgd")
        ->check(CLI::IsMember({"bmgd", "mgd"}));
    run->add_option("--out-csv", run_csv, "write the trace here");
    run->add_flag("--real-sleep", run_real_sleep, "sleep out the cost-model charges");
    run->add_flag("--no-pipeline", run_no_pipeline, "disable buffer prefetching");
    run->callback([&] {
        exit_code = guarded(
            [&] { cmd_run(run_config, run_method, run_csv, run_real_sleep, run_no_pipeline); });
    });

    // replicate --------------------------------------------------------
    auto* rep = app.add_subcommand("replicate", "Replicated study with summary statistics");
    std::string rep_config;
    std::uint32_t rep_jobs = 0;
    rep->add_option("--config", rep_config, "config file")->required();
    rep->add_option("--jobs", rep_jobs, "override rep.jobs");
    rep->callback([&] { exit_code = guarded([&] { cmd_replicate(rep_config, rep_jobs); }); });

    // analyze ----------------------------------------------------------
    auto* ana = app.add_subcommand(
        "analyze", "Closed-form fixed-partition analysis vs the actual run");
    std::string ana_config;
    ana->add_option("--config", ana_config, "config file")->required();
    ana->callback([&] { exit_code = guarded([&] { cmd_analyze(ana_config); }); });

    // bench ------------------------------------------------------------
    auto* bench = app.add_subcommand("bench", "Buffered vs unbuffered cost comparison");
    std::string bench_config;
    bool bench_real_sleep = false;
    bench->add_option("--config", bench_config, "config file")->required();
    bench->add_flag("--real-sleep", bench_real_sleep, "sleep out the cost-model charges");
    bench->callback(
        [&] { exit_code = guarded([&] { cmd_bench(bench_config, bench_real_sleep); }); });

    CLI11_PARSE(app, argc, argv);
    return exit_code;
}
