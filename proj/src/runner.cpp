#include "volterra/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>
#include <utility>

#include "volterra/hashing.hpp"

namespace volterra {

namespace {

namespace fs = std::filesystem;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string hex16(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

// Re-throws validation failures with the JSON path prepended, so a bad config
// is reported as e.g. "jobs[2].matrix: ...".
template <typename F>
auto in_context(const std::string& where, F&& f) {
    try {
        return f();
    } catch (const ConfigError& e) {
        throw ConfigError(where + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    } catch (const std::logic_error& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

// Job and functional names become file names; keep them shell- and
// filesystem-safe.
bool valid_name(const std::string& s) {
    if (s.empty() || s.size() > 64) return false;
    for (char ch : s) {
        const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                        (ch >= '0' && ch <= '9') || ch == '_' || ch == '-' || ch == '.';
        if (!ok) return false;
    }
    return true;
}

Index get_index(const Json& v, const std::string& where) {
    if (!json_uint(v)) fail(where, "must be a positive integer");
    const std::uint64_t raw = v.get<std::uint64_t>();
    if (raw == 0 || raw > 0xffffffffULL) fail(where, "out of index range");
    return static_cast<Index>(raw);
}

// Accepts the point literal forms plus factory objects:
//   {"kind": "unit", "k": 3}
//   {"kind": "uniform", "lo": 1, "hi": 8}
//   {"kind": "geometric", "n": 64}
SimplexPoint parse_point(const Json& j, const std::string& where) {
    return in_context(where, [&] {
        if (j.is_object() && j.contains("kind")) {
            if (!j["kind"].is_string()) throw ConfigError("\"kind\" must be a string");
            const std::string kind = j["kind"].get<std::string>();
            if (kind == "unit") {
                if (!j.contains("k")) throw ConfigError("unit point needs \"k\"");
                return SimplexPoint::unit(get_index(j["k"], "k"));
            }
            if (kind == "uniform") {
                if (!j.contains("lo") || !j.contains("hi"))
                    throw ConfigError("uniform point needs \"lo\" and \"hi\"");
                return SimplexPoint::uniform(get_index(j["lo"], "lo"), get_index(j["hi"], "hi"));
            }
            if (kind == "geometric") {
                if (!j.contains("n")) throw ConfigError("geometric point needs \"n\"");
                return SimplexPoint::geometric(get_index(j["n"], "n"));
            }
            throw ConfigError("unknown point kind \"" + kind + "\"");
        }
        return point_from_json(j);
    });
}

std::vector<FunctionalSpec> parse_functionals(const Json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "must be an array");
    std::vector<FunctionalSpec> out;
    std::size_t fi = 0;
    for (const auto& fj : j) {
        const std::string fwhere = where + "[" + std::to_string(fi) + "]";
        if (!fj.is_object()) fail(fwhere, "must be a functional descriptor object");
        std::string name = "phi" + std::to_string(fi);
        Json desc = fj;
        if (desc.contains("name")) {
            if (!desc["name"].is_string() || !valid_name(desc["name"].get<std::string>()))
                fail(fwhere + ".name", "must be a short name over [A-Za-z0-9_.-]");
            name = desc["name"].get<std::string>();
            desc.erase("name");
        }
        for (const auto& prev : out)
            if (prev.name == name) fail(fwhere + ".name", "duplicate name \"" + name + "\"");
        LinearFunctional f =
            in_context(fwhere, [&] { return LinearFunctional::from_json(desc); });
        out.push_back({std::move(name), std::move(f)});
        ++fi;
    }
    return out;
}

JobSpec parse_job(const Json& j, const AnalysisBudget& defaults, std::uint64_t default_dump,
                  const std::string& where) {
    if (!j.is_object()) fail(where, "must be an object");
    for (const auto& item : j.items()) {
        const std::string& key = item.key();
        const bool known = key == "name" || key == "description" || key == "matrix" ||
                           key == "x0" || key == "renormalize_x0" || key == "mode" ||
                           key == "budget" || key == "functionals" || key == "ergodic" ||
                           key == "dump_steps";
        if (!known) fail(where + "." + key, "unknown key");
    }

    if (!j.contains("name") || !j["name"].is_string() ||
        !valid_name(j["name"].get<std::string>()))
        fail(where + ".name", "need a short name over [A-Za-z0-9_.-]");
    const std::string name = j["name"].get<std::string>();

    if (!j.contains("matrix")) fail(where, "missing \"matrix\"");
    SkewMatrix matrix = in_context(where + ".matrix",
                                   [&] { return SkewMatrix::from_json(j["matrix"]); });

    if (!j.contains("x0")) fail(where, "missing \"x0\"");
    SimplexPoint x0 = parse_point(j["x0"], where + ".x0");
    if (j.contains("renormalize_x0")) {
        if (!j["renormalize_x0"].is_boolean()) fail(where + ".renormalize_x0", "must be a bool");
        if (j["renormalize_x0"].get<bool>())
            x0 = in_context(where + ".x0", [&] { return x0.renormalized(1.0); });
    }
    if (x0.is_zero()) fail(where + ".x0", "the zero point has no dynamics to analyze");

    ConvergenceMode mode = ConvergenceMode::Norm;
    if (j.contains("mode")) {
        if (!j["mode"].is_string()) fail(where + ".mode", "must be \"norm\" or \"weak\"");
        mode = in_context(where + ".mode",
                          [&] { return mode_from_string(j["mode"].get<std::string>()); });
    }

    AnalysisBudget budget = defaults;
    if (j.contains("budget"))
        budget = in_context(where + ".budget",
                            [&] { return AnalysisBudget::from_json(j["budget"], defaults); });

    std::vector<FunctionalSpec> functionals;
    if (j.contains("functionals"))
        functionals = parse_functionals(j["functionals"], where + ".functionals");

    bool ergodic = false;
    if (j.contains("ergodic")) {
        if (!j["ergodic"].is_boolean()) fail(where + ".ergodic", "must be a bool");
        ergodic = j["ergodic"].get<bool>();
    }

    std::uint64_t dump_steps = default_dump;
    if (j.contains("dump_steps")) {
        if (!json_uint(j["dump_steps"]))
            fail(where + ".dump_steps", "must be a nonnegative integer");
        dump_steps = j["dump_steps"].get<std::uint64_t>();
    }

    return JobSpec{name,   std::move(matrix),      std::move(x0), mode,
                   budget, std::move(functionals), ergodic,       dump_steps};
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + p.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("short write to " + p.string());
}

std::string dump_json(const Json& j) {
    return j.dump(2) + "\n";
}

Json json_or_null(const std::optional<std::uint64_t>& v) {
    return v ? Json(*v) : Json(nullptr);
}

Json evidence_to_json(const OmegaEvidence& e) {
    Json trend = Json::array();
    for (const auto& s : e.mass_trend)
        trend.push_back(Json{{"step", s.step}, {"head_mass", s.head_mass}});
    return Json{{"steps_used", e.steps_used},
                {"final_l1", e.final_l1},
                {"final_rho", e.final_rho},
                {"first_step_l1_below", json_or_null(e.first_step_l1_below)},
                {"first_step_rho_below", json_or_null(e.first_step_rho_below)},
                {"head_mass_monotone", e.head_mass_monotone},
                {"mass_trend", trend}};
}

Json admissibility_to_json(const AdmissibilityReport& a) {
    return Json{{"matrix_class", to_string(a.matrix_class.tag)},
                {"k0", a.matrix_class.k0},
                {"window", a.window},
                {"sign_opposed_pairs", a.sign_opposed_pairs},
                {"plus_with_increasing", a.plus_with_increasing},
                {"minus_with_decreasing", a.minus_with_decreasing},
                {"sign_definite_c0_decreasing", a.sign_definite_c0_decreasing}};
}

Json ergodic_to_json(const std::string& job_name, const ErgodicReport& er) {
    Json cps = Json::array();
    for (const auto& cp : er.checkpoints)
        cps.push_back(Json{{"n", cp.n},
                           {"average_mass", cp.average.mass()},
                           {"stable_mass", cp.stable_mass},
                           {"rho_to_prev", cp.rho_to_prev}});
    return Json{{"job", job_name},
                {"checkpoints", cps},
                {"weak_limit", point_to_json(er.weak_limit)},
                {"mass_of_weak_limit", er.mass_of_weak_limit},
                {"weak_verdict", to_string(er.weak_verdict)},
                {"norm_verdict", to_string(er.norm_verdict)},
                {"budget", er.budget.to_json()}};
}

struct JobArtifacts {
    std::vector<std::pair<std::string, std::string>> files;
    std::string console;
};

JobArtifacts execute_job(const JobSpec& job) {
    JobArtifacts out;
    const VolterraOperator V(job.matrix, std::max<Index>(64, job.budget.probe_dim));
    const OmegaEstimate est = estimate_omega(V, job.x0, job.mode, job.budget);
    const std::uint64_t horizon = est.evidence.steps_used;
    const std::uint64_t dump_cap = std::min(job.dump_steps, horizon);

    // Second pass over the same orbit: dump the first dump_cap steps and
    // stream the functional values across the whole analyzed stretch.
    std::string csv = "step,index,value\n";
    Json steps_json = Json::array();
    std::vector<std::vector<double>> fvals(job.functionals.size());
    for (auto& v : fvals) v.reserve(static_cast<std::size_t>(horizon) + 1);

    auto dump_rows = [&csv](std::uint64_t t, const SimplexPoint& p) {
        for (const auto& c : p.coords()) {
            csv += std::to_string(t);
            csv += ',';
            csv += std::to_string(c.index);
            csv += ',';
            csv += fmt17(c.value);
            csv += '\n';
        }
    };
    auto push_phis = [&](const SimplexPoint& p) {
        for (std::size_t fi = 0; fi < job.functionals.size(); ++fi)
            fvals[fi].push_back(phi(job.functionals[fi].functional, p));
    };

    SimplexPoint x = job.x0;
    std::uint64_t flushes = 0;
    dump_rows(0, x);
    steps_json.push_back(Json{{"step", 0}, {"mass", x.mass()}});
    push_phis(x);
    for (std::uint64_t t = 1; t <= horizon; ++t) {
        ApplyOutcome stepped = apply_step(V, x);
        flushes += stepped.flushed.size();
        if (t <= dump_cap) {
            dump_rows(t, stepped.next);
            steps_json.push_back(Json{{"step", t},
                                      {"mass", stepped.next.mass()},
                                      {"l1_delta", l1_distance(x, stepped.next)},
                                      {"rho_delta", rho_distance(x, stepped.next)}});
        }
        x = std::move(stepped.next);
        push_phis(x);
    }

    out.files.emplace_back(job.name + "_trajectory.csv", std::move(csv));
    out.files.emplace_back(job.name + "_trajectory.json",
                           dump_json(Json{{"job", job.name},
                                          {"total_steps", horizon},
                                          {"dumped_steps", dump_cap},
                                          {"flush_count", flushes},
                                          {"steps", steps_json}}));

    out.files.emplace_back(
        job.name + "_verdict.json",
        dump_json(Json{{"job", job.name},
                       {"matrix", job.matrix.descriptor()},
                       {"x0", point_to_json(job.x0)},
                       {"mode", to_string(job.mode)},
                       {"verdict", to_string(est.kind)},
                       {"vertex", est.vertex ? Json(*est.vertex) : Json(nullptr)},
                       {"r_estimate", est.r_estimate},
                       {"limit_point", point_to_json(est.limit_point)},
                       {"evidence", evidence_to_json(est.evidence)},
                       {"budget", est.budget.to_json()}}));

    if (!job.functionals.empty()) {
        Json fl = Json::array();
        for (std::size_t fi = 0; fi < job.functionals.size(); ++fi) {
            const auto& spec = job.functionals[fi];
            const MonotonicityReport rep = monotonicity_from_values(std::move(fvals[fi]));
            const AdmissibilityReport adm =
                admissibility(spec.functional, job.matrix, job.budget.probe_dim);
            fl.push_back(Json{{"name", spec.name},
                              {"descriptor", spec.functional.descriptor()},
                              {"verdict", to_string(rep.verdict)},
                              {"initial", rep.values.front()},
                              {"final", rep.values.back()},
                              {"limit_estimate", rep.limit_estimate},
                              {"cauchy_width", rep.cauchy_width},
                              {"nonincreasing", rep.nonincreasing},
                              {"nondecreasing", rep.nondecreasing},
                              {"admissibility", admissibility_to_json(adm)}});
        }
        out.files.emplace_back(job.name + "_monotonicity.json",
                               dump_json(Json{{"job", job.name},
                                              {"steps", horizon},
                                              {"slack", tol::slack},
                                              {"functionals", fl}}));
    }

    std::string ergodic_note;
    if (job.ergodic) {
        const ErgodicReport er = ergodicity_verdict(V, job.x0, job.budget);
        out.files.emplace_back(job.name + "_ergodic.json", dump_json(ergodic_to_json(job.name, er)));
        ergodic_note = " ergodic=" + to_string(er.norm_verdict) + "/" + to_string(er.weak_verdict);
    }

    out.console = job.name + ": " + to_string(est.kind);
    if (est.vertex) out.console += "(e" + std::to_string(*est.vertex) + ")";
    out.console += " steps=" + std::to_string(horizon);
    out.console += " r=" + fmt17(est.r_estimate);
    out.console += ergodic_note;
    return out;
}

unsigned pick_workers(unsigned requested, std::size_t njobs) {
    unsigned w = requested;
    if (w == 0) {
        w = std::thread::hardware_concurrency();
        if (w == 0) w = 1;
    }
    if (njobs == 0) njobs = 1;
    return static_cast<unsigned>(std::min<std::size_t>(w, njobs));
}

void apply_overrides(std::vector<JobSpec>& jobs, const RunOptions& opts) {
    if (opts.tol_conv && *opts.tol_conv <= 0.0)
        throw ConfigError("tol-conv override must be positive");
    if (opts.max_steps && *opts.max_steps == 0)
        throw ConfigError("max-steps override must be positive");
    for (auto& job : jobs) {
        if (opts.tol_conv) job.budget.eps_conv = *opts.tol_conv;
        if (opts.max_steps) job.budget.max_steps = *opts.max_steps;
    }
}

struct TaskResult {
    bool ok = false;
    std::string error;
    double wall_ms = 0.0;
    std::vector<std::string> outputs;
};

// Runs fn(idx) for idx in [0, count) on a small pool; fn must only touch its
// own slot of any shared output vector.
template <typename F>
void run_pool(std::size_t count, unsigned workers, F&& fn) {
    std::atomic<std::size_t> cursor{0};
    auto work = [&] {
        for (;;) {
            const std::size_t idx = cursor.fetch_add(1);
            if (idx >= count) return;
            fn(idx);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
}

std::mutex console_mutex;

void console_line(bool quiet, bool to_stderr, const std::string& line) {
    if (quiet && !to_stderr) return;
    const std::lock_guard<std::mutex> lock(console_mutex);
    std::fprintf(to_stderr ? stderr : stdout, "%s\n", line.c_str());
}

Json manifest_jobs(const std::vector<std::string>& names, const std::vector<TaskResult>& results) {
    Json arr = Json::array();
    for (std::size_t idx = 0; idx < names.size(); ++idx) {
        Json entry{{"name", names[idx]}, {"status", results[idx].ok ? "ok" : "failed"}};
        if (!results[idx].ok) entry["error"] = results[idx].error;
        entry["wall_ms"] = results[idx].wall_ms;
        entry["outputs"] = results[idx].outputs;
        arr.push_back(std::move(entry));
    }
    return arr;
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

} // namespace

ExperimentConfig config_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    for (const auto& item : j.items()) {
        const std::string& key = item.key();
        if (key != "budget" && key != "dump_steps" && key != "jobs" && key != "description")
            fail("config." + key, "unknown key");
    }

    AnalysisBudget defaults;
    if (j.contains("budget"))
        defaults = in_context("config.budget",
                              [&] { return AnalysisBudget::from_json(j["budget"], AnalysisBudget{}); });

    std::uint64_t default_dump = 100;
    if (j.contains("dump_steps")) {
        if (!json_uint(j["dump_steps"]))
            fail("config.dump_steps", "must be a nonnegative integer");
        default_dump = j["dump_steps"].get<std::uint64_t>();
    }

    if (!j.contains("jobs") || !j["jobs"].is_array() || j["jobs"].empty())
        throw ConfigError("config.jobs: need a nonempty array");

    ExperimentConfig cfg{defaults, {}, j};
    std::size_t idx = 0;
    for (const auto& jj : j["jobs"]) {
        cfg.jobs.push_back(parse_job(jj, defaults, default_dump, "jobs[" + std::to_string(idx) + "]"));
        ++idx;
    }
    for (std::size_t a = 0; a < cfg.jobs.size(); ++a)
        for (std::size_t b = a + 1; b < cfg.jobs.size(); ++b)
            if (cfg.jobs[a].name == cfg.jobs[b].name)
                fail("jobs", "duplicate job name \"" + cfg.jobs[a].name + "\"");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file \"" + path + "\"");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config file \"" + path + "\" is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

int run_config(const ExperimentConfig& config, const RunOptions& opts) {
    std::vector<JobSpec> jobs = config.jobs;
    apply_overrides(jobs, opts);

    const fs::path out_dir(opts.out_dir);
    fs::create_directories(out_dir);

    std::vector<TaskResult> results(jobs.size());
    run_pool(jobs.size(), pick_workers(opts.workers, jobs.size()), [&](std::size_t idx) {
        const auto t0 = std::chrono::steady_clock::now();
        TaskResult& r = results[idx];
        try {
            JobArtifacts art = execute_job(jobs[idx]);
            for (auto& [fname, content] : art.files) {
                write_file(out_dir / fname, content);
                r.outputs.push_back(fname);
            }
            r.ok = true;
            console_line(opts.quiet, false, art.console);
        } catch (const std::exception& e) {
            r.error = e.what();
            console_line(opts.quiet, true, "job " + jobs[idx].name + " failed: " + e.what());
        }
        r.wall_ms = elapsed_ms(t0);
    });

    std::vector<std::string> names;
    names.reserve(jobs.size());
    for (const auto& job : jobs) names.push_back(job.name);

    const std::string raw = config.raw.dump();
    write_file(out_dir / "manifest.json",
               dump_json(Json{{"tool", "volterra"},
                              {"version", tool_version},
                              {"command", "run"},
                              {"config_fingerprint", hex16(fnv1a64(raw.data(), raw.size()))},
                              {"jobs", manifest_jobs(names, results)}}));

    const bool all_ok =
        std::all_of(results.begin(), results.end(), [](const TaskResult& r) { return r.ok; });
    return all_ok ? 0 : 2;
}

namespace {

struct SweepRun {
    JobSpec job;      // derived
    std::string base; // original job name
    std::uint64_t value = 0;
};

std::vector<SweepRun> derive_sweep_runs(const std::vector<JobSpec>& jobs, const SweepAxis& axis) {
    const bool known =
        axis.name == "truncation" || axis.name == "seed" || axis.name == "max_steps";
    if (!known) throw ConfigError("unknown sweep axis \"" + axis.name + "\"");
    if (axis.values.empty()) throw ConfigError("sweep axis needs at least one value");

    std::vector<std::uint64_t> values;
    for (double v : axis.values) {
        if (!(v >= 0.0) || v != std::floor(v) || v > 9e15)
            throw ConfigError("sweep values must be nonnegative integers");
        if (v == 0.0 && axis.name != "seed")
            throw ConfigError("sweep value 0 is only meaningful for the seed axis");
        if (axis.name == "truncation" && v > 0xffffffffULL)
            throw ConfigError("truncation value out of index range");
        values.push_back(static_cast<std::uint64_t>(v));
    }
    for (std::size_t a = 0; a < values.size(); ++a)
        for (std::size_t b = a + 1; b < values.size(); ++b)
            if (values[a] == values[b]) throw ConfigError("sweep values must be distinct");

    std::vector<SweepRun> runs;
    for (const auto& job : jobs) {
        for (std::uint64_t v : values) {
            JobSpec derived = job;
            derived.name = job.name + "_" + axis.name + "_" + std::to_string(v);
            derived.dump_steps = 0;
            if (axis.name == "truncation") {
                derived.x0 = SimplexPoint::geometric(static_cast<Index>(v));
            } else if (axis.name == "seed") {
                Json desc = job.matrix.descriptor();
                if (!desc.is_object() || desc.value("kind", std::string()) != "random")
                    throw ConfigError("sweep axis \"seed\" needs a random matrix in job \"" +
                                      job.name + "\"");
                desc["seed"] = v;
                derived.matrix = SkewMatrix::from_json(desc);
            } else {
                derived.budget.max_steps = v;
            }
            runs.push_back({std::move(derived), job.name, v});
        }
    }
    return runs;
}

struct SweepOutcome {
    OmegaEstimate est;
    std::optional<ErgodicReport> ergodic;
    std::vector<std::pair<std::string, double>> phi_at_limit;
};

SweepOutcome execute_sweep_run(const JobSpec& job) {
    const VolterraOperator V(job.matrix, std::max<Index>(64, job.budget.probe_dim));
    SweepOutcome out{estimate_omega(V, job.x0, job.mode, job.budget), {}, {}};
    if (job.ergodic) out.ergodic = ergodicity_verdict(V, job.x0, job.budget);
    for (const auto& spec : job.functionals)
        out.phi_at_limit.emplace_back(spec.name, phi(spec.functional, out.est.limit_point));
    return out;
}

} // namespace

int run_sweep(const ExperimentConfig& config, const SweepAxis& axis, const RunOptions& opts) {
    std::vector<JobSpec> jobs = config.jobs;
    apply_overrides(jobs, opts);
    std::vector<SweepRun> runs = derive_sweep_runs(jobs, axis);

    const fs::path out_dir(opts.out_dir);
    fs::create_directories(out_dir);

    std::vector<TaskResult> results(runs.size());
    std::vector<std::optional<SweepOutcome>> outcomes(runs.size());
    run_pool(runs.size(), pick_workers(opts.workers, runs.size()), [&](std::size_t idx) {
        const auto t0 = std::chrono::steady_clock::now();
        TaskResult& r = results[idx];
        try {
            outcomes[idx] = execute_sweep_run(runs[idx].job);
            r.ok = true;
            const OmegaEstimate& est = outcomes[idx]->est;
            std::string line = runs[idx].job.name + ": " + to_string(est.kind);
            if (est.vertex) line += "(e" + std::to_string(*est.vertex) + ")";
            console_line(opts.quiet, false, line);
        } catch (const std::exception& e) {
            r.error = e.what();
            console_line(opts.quiet, true, "sweep run " + runs[idx].job.name + " failed: " + e.what());
        }
        r.wall_ms = elapsed_ms(t0);
    });

    // Aggregate CSV: one row per successful run, config order.
    std::string csv =
        "job,axis,value,verdict,vertex,r_estimate,steps_used,final_l1,final_rho,"
        "head_mass,escaped_mass,weak_verdict,norm_verdict,mass_of_weak_limit,phi_at_limit\n";
    Json runs_json = Json::array();
    for (std::size_t idx = 0; idx < runs.size(); ++idx) {
        if (!outcomes[idx]) continue;
        const SweepRun& run = runs[idx];
        const SweepOutcome& oc = *outcomes[idx];
        const OmegaEstimate& est = oc.est;
        const double head_mass = est.evidence.mass_trend.back().head_mass;
        const double escaped = std::max(0.0, run.job.x0.mass() - head_mass);

        csv += run.base;
        csv += ',' + axis.name;
        csv += ',' + std::to_string(run.value);
        csv += ',' + to_string(est.kind);
        csv += ',';
        if (est.vertex) csv += std::to_string(*est.vertex);
        csv += ',' + fmt17(est.r_estimate);
        csv += ',' + std::to_string(est.evidence.steps_used);
        csv += ',' + fmt17(est.evidence.final_l1);
        csv += ',' + fmt17(est.evidence.final_rho);
        csv += ',' + fmt17(head_mass);
        csv += ',' + fmt17(escaped);
        csv += ',';
        if (oc.ergodic) csv += to_string(oc.ergodic->weak_verdict);
        csv += ',';
        if (oc.ergodic) csv += to_string(oc.ergodic->norm_verdict);
        csv += ',';
        if (oc.ergodic) csv += fmt17(oc.ergodic->mass_of_weak_limit);
        csv += ',';
        // Functional values at the estimated limit, packed name=value;...
        // so the header stays fixed across jobs with different functionals.
        for (std::size_t pj = 0; pj < oc.phi_at_limit.size(); ++pj) {
            if (pj > 0) csv += ';';
            csv += oc.phi_at_limit[pj].first;
            csv += '=';
            csv += fmt17(oc.phi_at_limit[pj].second);
        }
        csv += '\n';

        Json phi_json = Json::object();
        for (const auto& [fname, fval] : oc.phi_at_limit) phi_json[fname] = fval;
        Json entry{{"job", run.base},
                   {"name", run.job.name},
                   {"value", run.value},
                   {"verdict", to_string(est.kind)},
                   {"vertex", est.vertex ? Json(*est.vertex) : Json(nullptr)},
                   {"r_estimate", est.r_estimate},
                   {"steps_used", est.evidence.steps_used},
                   {"final_l1", est.evidence.final_l1},
                   {"final_rho", est.evidence.final_rho},
                   {"head_mass", head_mass},
                   {"escaped_mass", escaped},
                   {"phi_at_limit", phi_json}};
        if (oc.ergodic) entry["ergodic"] = ergodic_to_json(run.job.name, *oc.ergodic);
        runs_json.push_back(std::move(entry));
    }

    Json sweep_json{{"axis", axis.name},
                    {"values", Json::array()},
                    {"runs", runs_json}};
    for (double v : axis.values) sweep_json["values"].push_back(static_cast<std::uint64_t>(v));

    // Truncation sweeps over ergodicity jobs carry the extrapolation analysis:
    // finite-window averages sinking as the truncation grows.
    if (axis.name == "truncation") {
        Json analyses = Json::array();
        for (const auto& job : jobs) {
            if (!job.ergodic) continue;
            std::vector<TruncationRun> truncation_runs;
            for (std::size_t idx = 0; idx < runs.size(); ++idx) {
                if (runs[idx].base != job.name || !outcomes[idx] || !outcomes[idx]->ergodic)
                    continue;
                const ErgodicReport& er = *outcomes[idx]->ergodic;
                truncation_runs.push_back({static_cast<Index>(runs[idx].value),
                                           er.checkpoints.back().average,
                                           er.mass_of_weak_limit});
            }
            std::sort(truncation_runs.begin(), truncation_runs.end(),
                      [](const TruncationRun& a, const TruncationRun& b) {
                          return a.truncation < b.truncation;
                      });
            if (truncation_runs.size() < 2) continue;
            const TruncationSweepReport rep = analyze_truncation_sweep(truncation_runs, 8);
            analyses.push_back(
                Json{{"job", job.name},
                     {"coord_probe", rep.coord_probe},
                     {"coordinate_averages_decrease", rep.coordinate_averages_decrease},
                     {"stable_masses_decrease", rep.stable_masses_decrease},
                     {"extrapolates_non_ergodic", rep.extrapolates_non_ergodic}});
        }
        if (!analyses.empty()) sweep_json["truncation_analysis"] = analyses;
    }

    write_file(out_dir / ("sweep_" + axis.name + ".csv"), csv);
    write_file(out_dir / ("sweep_" + axis.name + ".json"), dump_json(sweep_json));

    std::vector<std::string> names;
    names.reserve(runs.size());
    for (const auto& run : runs) names.push_back(run.job.name);
    for (std::size_t idx = 0; idx < results.size(); ++idx)
        if (results[idx].ok)
            results[idx].outputs = {"sweep_" + axis.name + ".csv", "sweep_" + axis.name + ".json"};

    const std::string raw = config.raw.dump();
    Json axis_json{{"name", axis.name}, {"values", sweep_json["values"]}};
    write_file(out_dir / "manifest.json",
               dump_json(Json{{"tool", "volterra"},
                              {"version", tool_version},
                              {"command", "sweep"},
                              {"config_fingerprint", hex16(fnv1a64(raw.data(), raw.size()))},
                              {"axis", axis_json},
                              {"jobs", manifest_jobs(names, results)}}));

    const bool all_ok =
        std::all_of(results.begin(), results.end(), [](const TaskResult& r) { return r.ok; });
    return all_ok ? 0 : 2;
}

} // namespace volterra
