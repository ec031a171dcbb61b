#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "volterra/runner.hpp"

// Exit codes: 0 success, 1 configuration/usage error, 2 runtime failure.
int main(int argc, char** argv) {
    CLI::App app{"Volterra operators on the infinite simplex: trajectory runs, "
                 "limit verdicts, Lyapunov monotonicity, ergodicity checks"};
    app.set_version_flag("--version", volterra::tool_version);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    unsigned workers = 0;
    std::optional<double> tol_conv;
    std::optional<std::uint64_t> max_steps;
    bool quiet = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "experiment config (JSON)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir,
                        "output directory (default: $VOLTERRA_OUT, then ./out)");
        sub->add_option("--jobs", workers, "worker threads, 0 = hardware")->check(CLI::Range(0, 1024));
        sub->add_option("--tol-conv", tol_conv, "override eps_conv for every job")
            ->check(CLI::PositiveNumber);
        sub->add_option("--max-steps", max_steps, "override max_steps for every job")
            ->check(CLI::PositiveNumber);
        sub->add_flag("--quiet", quiet, "suppress per-job progress lines");
    };

    CLI::App* run = app.add_subcommand("run", "run every job in the config");
    add_common(run);

    CLI::App* sweep = app.add_subcommand("sweep", "rerun jobs across an axis of values");
    add_common(sweep);
    std::string axis_name;
    std::vector<double> axis_values;
    sweep->add_option("--axis", axis_name, "truncation | seed | max_steps")->required();
    sweep->add_option("--values", axis_values, "comma-separated axis values")
        ->required()
        ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (out_dir.empty()) {
        if (const char* env = std::getenv("VOLTERRA_OUT")) out_dir = env;
        if (out_dir.empty()) out_dir = "out";
    }

    volterra::RunOptions opts;
    opts.out_dir = out_dir;
    opts.workers = workers;
    opts.tol_conv = tol_conv;
    opts.max_steps = max_steps;
    opts.quiet = quiet;

    try {
        const volterra::ExperimentConfig config = volterra::load_config(config_path);
        if (sweep->parsed())
            return volterra::run_sweep(config, volterra::SweepAxis{axis_name, axis_values}, opts);
        return volterra::run_config(config, opts);
    } catch (const volterra::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
