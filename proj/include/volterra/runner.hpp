#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "volterra/analysis.hpp"
#include "volterra/lyapunov.hpp"

namespace volterra {

inline constexpr const char* tool_version = "1.0.0";

struct FunctionalSpec {
    std::string name;
    LinearFunctional functional;
};

// One experiment: an operator, a starting point, and what to measure.
struct JobSpec {
    std::string name;
    SkewMatrix matrix;
    SimplexPoint x0;
    ConvergenceMode mode = ConvergenceMode::Norm;
    AnalysisBudget budget;
    std::vector<FunctionalSpec> functionals;
    bool ergodic = false;
    // Trajectory rows are dumped for steps 0..dump_steps only; the analysis
    // itself always runs the full budget.
    std::uint64_t dump_steps = 100;
};

struct ExperimentConfig {
    AnalysisBudget default_budget;
    std::vector<JobSpec> jobs;
    Json raw; // the parsed document, kept for the manifest fingerprint
};

// Parses and fully validates; ConfigError messages name the offending path
// (e.g. "jobs[2].matrix"). config_from_json is the file-free core.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_json(const Json& j);

struct RunOptions {
    std::string out_dir = "out";
    unsigned workers = 0; // 0 picks hardware concurrency
    std::optional<double> tol_conv;
    std::optional<std::uint64_t> max_steps;
    bool quiet = false;
};

// Runs every job, writes per-job trajectory/verdict/monotonicity/ergodicity
// files plus manifest.json under opts.out_dir. Returns 0, or 2 if any job
// failed at runtime (the manifest records which, and why).
int run_config(const ExperimentConfig& config, const RunOptions& opts);

// One sweep dimension. Axis names: "truncation" (x0 becomes the renormalized
// geometric point on {1..N}), "seed" (random matrix reseeded), "max_steps"
// (budget override). Values must be positive integers in double form.
struct SweepAxis {
    std::string name;
    std::vector<double> values;
};

// Runs jobs x values, writes sweep_<axis>.csv, sweep_<axis>.json and
// manifest.json. For the truncation axis on ergodicity jobs the JSON also
// carries the shrinking-average extrapolation analysis. Exit code as above.
int run_sweep(const ExperimentConfig& config, const SweepAxis& axis, const RunOptions& opts);

} // namespace volterra
