#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "volterra/runner.hpp"

using namespace volterra;
namespace fs = std::filesystem;

namespace {

template <typename F>
std::string config_error_of(F&& f) {
    try {
        f();
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

bool mentions(const std::string& message, const std::string& needle) {
    return message.find(needle) != std::string::npos;
}

Json minimal_config() {
    return Json::parse(R"({
      "jobs": [
        {
          "name": "still",
          "matrix": {"kind": "constant", "c": 0.0},
          "x0": [0.5, 0.5],
          "budget": {"max_steps": 50},
          "dump_steps": 5
        }
      ]
    })");
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(bool(in));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("volterra_unit_" + name);
    fs::remove_all(dir);
    return dir;
}

} // namespace

TEST_SUITE("runner") {

TEST_CASE("a full experiment document parses into jobs") {
    const auto j = Json::parse(R"({
      "description": "two jobs sharing a default budget",
      "budget": {"max_steps": 300, "eps_conv": 1e-7},
      "dump_steps": 12,
      "jobs": [
        {
          "name": "drain",
          "matrix": {"kind": "constant", "c": -1.0},
          "x0": {"kind": "uniform", "lo": 1, "hi": 8},
          "mode": "norm",
          "ergodic": true,
          "functionals": [
            {"name": "bm2", "kind": "bm", "m": 2},
            {"kind": "harmonic", "n": 3}
          ]
        },
        {
          "name": "still",
          "matrix": {"kind": "constant", "c": 0.0},
          "x0": {"3": 0.25, "5": 0.75},
          "mode": "weak",
          "budget": {"max_steps": 40},
          "dump_steps": 0
        }
      ]
    })");
    const auto cfg = config_from_json(j);
    REQUIRE(cfg.jobs.size() == 2);

    const auto& a = cfg.jobs[0];
    CHECK(a.name == "drain");
    CHECK(a.mode == ConvergenceMode::Norm);
    CHECK(a.budget.max_steps == 300);
    CHECK(a.budget.eps_conv == 1e-7);
    CHECK(a.dump_steps == 12);
    CHECK(a.ergodic);
    REQUIRE(a.functionals.size() == 2);
    CHECK(a.functionals[0].name == "bm2");
    CHECK(a.functionals[1].name == "phi1"); // positional fallback name
    CHECK(a.x0 == SimplexPoint::uniform(1, 8));

    const auto& b = cfg.jobs[1];
    CHECK(b.mode == ConvergenceMode::Weak);
    CHECK(b.budget.max_steps == 40);
    CHECK(b.budget.eps_conv == 1e-7); // default still applies underneath
    CHECK(b.dump_steps == 0);
    CHECK(!b.ergodic);
    CHECK(b.x0.value_at(5) == 0.75);

    CHECK(cfg.default_budget.max_steps == 300);
    CHECK(cfg.raw == j);
}

TEST_CASE("x0 factory forms") {
    auto j = minimal_config();
    j["jobs"][0]["x0"] = Json{{"kind", "unit"}, {"k", 4}};
    CHECK(config_from_json(j).jobs[0].x0 == SimplexPoint::unit(4));

    j["jobs"][0]["x0"] = Json{{"kind", "geometric"}, {"n", 6}};
    CHECK(config_from_json(j).jobs[0].x0 == SimplexPoint::geometric(6));

    j["jobs"][0]["x0"] = Json{{"kind", "uniform"}, {"lo", 2}, {"hi", 5}};
    CHECK(config_from_json(j).jobs[0].x0 == SimplexPoint::uniform(2, 5));

    // literals off the sphere stay as written unless renormalization is asked for
    j["jobs"][0]["x0"] = Json::parse("[0.25, 0.25]");
    CHECK(config_from_json(j).jobs[0].x0.mass() == 0.5);
    j["jobs"][0]["renormalize_x0"] = true;
    CHECK(config_from_json(j).jobs[0].x0.mass() == 1.0);
}

TEST_CASE("config rejection messages name the offending path") {
    CHECK(mentions(config_error_of([] { config_from_json(Json::parse("[]")); }), "top level"));
    CHECK(mentions(config_error_of([] { config_from_json(Json::parse(R"({"jobs": []})")); }),
                   "config.jobs"));
    CHECK(mentions(config_error_of([] {
                       config_from_json(Json::parse(R"({"jobs": [{}], "surprise": 1})"));
                   }),
                   "config.surprise"));

    auto j = minimal_config();
    j["jobs"][0].erase("name");
    CHECK(mentions(config_error_of([&] { config_from_json(j); }), "jobs[0]"));

    j = minimal_config();
    j["jobs"][0]["name"] = "bad name with spaces";
    CHECK(mentions(config_error_of([&] { config_from_json(j); }), "jobs[0].name"));

    j = minimal_config();
    j["jobs"][0]["matrix"] = Json{{"kind", "constant"}, {"c", 3.0}};
    CHECK(mentions(config_error_of([&] { config_from_json(j); }), "jobs[0].matrix"));

    j = minimal_config();
    j["jobs"][0]["x0"] = Json::parse("[]");
    CHECK(mentions(config_error_of([&] { config_from_json(j); }), "jobs[0].x0"));

    j = minimal_config();
    j["jobs"][0]["budget"] = Json{{"max_steps", 0}};
    CHECK(mentions(config_error_of([&] { config_from_json(j); }), "jobs[0].budget"));

    j = minimal_config();
    j["jobs"][0]["mode"] = "sideways";
    CHECK(mentions(config_error_of([&] { config_from_json(j); }), "jobs[0].mode"));

    j = minimal_config();
    j["jobs"][0]["flavor"] = "vanilla";
    CHECK(mentions(config_error_of([&] { config_from_json(j); }), "jobs[0].flavor"));

    j = minimal_config();
    j["jobs"][0]["functionals"] = Json::parse(R"([{"name": "f", "kind": "bm", "m": 2},
                                                  {"name": "f", "kind": "bm", "m": 3}])");
    CHECK(mentions(config_error_of([&] { config_from_json(j); }), "duplicate name"));

    j = minimal_config();
    j["jobs"].push_back(j["jobs"][0]);
    CHECK(mentions(config_error_of([&] { config_from_json(j); }), "duplicate job name"));
}

TEST_CASE("config files that do not load") {
    CHECK(mentions(config_error_of([] { load_config("/nonexistent/volterra.json"); }),
                   "cannot open"));

    const fs::path bad = fs::temp_directory_path() / "volterra_unit_bad.json";
    std::ofstream(bad) << "{ not json";
    CHECK(mentions(config_error_of([&] { load_config(bad.string()); }), "not valid JSON"));
    fs::remove(bad);
}

TEST_CASE("a run writes per-job files and a manifest") {
    const auto cfg = config_from_json(minimal_config());
    const fs::path dir = fresh_dir("run");
    RunOptions opts;
    opts.out_dir = dir.string();
    opts.workers = 1;
    opts.quiet = true;

    CHECK(run_config(cfg, opts) == 0);

    for (const char* name : {"still_trajectory.csv", "still_trajectory.json",
                             "still_verdict.json", "manifest.json"}) {
        CHECK(fs::exists(dir / name));
    }
    CHECK(!fs::exists(dir / "still_monotonicity.json")); // no functionals requested
    CHECK(!fs::exists(dir / "still_ergodic.json"));

    const auto verdict = Json::parse(slurp(dir / "still_verdict.json"));
    CHECK(verdict["job"] == "still");
    CHECK(verdict["verdict"] == "PointOnSphere");
    CHECK(verdict["evidence"]["steps_used"] == 50);
    CHECK(verdict["r_estimate"] == 1.0);

    const auto traj = Json::parse(slurp(dir / "still_trajectory.json"));
    CHECK(traj["total_steps"] == 50);
    CHECK(traj["dumped_steps"] == 5);
    CHECK(traj["steps"].size() == 6); // step 0 plus the dumped ones
    CHECK(traj["flush_count"] == 0);

    // csv rows: header plus two coordinates for each dumped step
    const auto csv = slurp(dir / "still_trajectory.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);
    CHECK(csv.rfind("step,index,value\n", 0) == 0);

    const auto manifest = Json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["tool"] == "volterra");
    CHECK(manifest["command"] == "run");
    CHECK(manifest["config_fingerprint"].get<std::string>().size() == 16);
    REQUIRE(manifest["jobs"].size() == 1);
    CHECK(manifest["jobs"][0]["status"] == "ok");
    CHECK(manifest["jobs"][0]["outputs"].size() == 3);

    fs::remove_all(dir);
}

TEST_CASE("two runs of one config produce identical files") {
    auto j = minimal_config();
    j["jobs"][0]["functionals"] = Json::parse(R"([{"name": "bm2", "kind": "bm", "m": 2}])");
    j["jobs"][0]["ergodic"] = true;
    const auto cfg = config_from_json(j);

    const fs::path d1 = fresh_dir("det1");
    const fs::path d2 = fresh_dir("det2");
    for (const auto& dir : {d1, d2}) {
        RunOptions opts;
        opts.out_dir = dir.string();
        opts.quiet = true;
        CHECK(run_config(cfg, opts) == 0);
    }
    for (const char* name : {"still_trajectory.csv", "still_trajectory.json", "still_verdict.json",
                             "still_monotonicity.json", "still_ergodic.json"}) {
        CHECK(slurp(d1 / name) == slurp(d2 / name));
    }
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("command-line overrides reshape every budget") {
    const auto cfg = config_from_json(minimal_config());
    const fs::path dir = fresh_dir("override");
    RunOptions opts;
    opts.out_dir = dir.string();
    opts.max_steps = 17;
    opts.tol_conv = 1e-5;
    opts.quiet = true;
    CHECK(run_config(cfg, opts) == 0);

    const auto verdict = Json::parse(slurp(dir / "still_verdict.json"));
    CHECK(verdict["evidence"]["steps_used"] == 17);
    CHECK(verdict["budget"]["max_steps"] == 17);
    CHECK(verdict["budget"]["eps_conv"] == 1e-5);
    fs::remove_all(dir);

    RunOptions bad;
    bad.max_steps = 0;
    CHECK_THROWS_AS(run_config(cfg, bad), ConfigError);
}

TEST_CASE("sweeping a budget axis changes nothing for a stationary job") {
    const auto cfg = config_from_json(minimal_config());
    const fs::path dir = fresh_dir("sweep");
    RunOptions opts;
    opts.out_dir = dir.string();
    opts.workers = 1;
    opts.quiet = true;

    CHECK(run_sweep(cfg, SweepAxis{"max_steps", {10.0, 100.0}}, opts) == 0);
    CHECK(fs::exists(dir / "sweep_max_steps.csv"));

    const auto sweep = Json::parse(slurp(dir / "sweep_max_steps.json"));
    CHECK(sweep["axis"] == "max_steps");
    REQUIRE(sweep["runs"].size() == 2);
    CHECK(sweep["runs"][0]["name"] == "still_max_steps_10");
    CHECK(sweep["runs"][0]["verdict"] == sweep["runs"][1]["verdict"]);
    CHECK(sweep["runs"][0]["r_estimate"] == sweep["runs"][1]["r_estimate"]);
    CHECK(sweep["runs"][0]["steps_used"] == 10);
    CHECK(sweep["runs"][1]["steps_used"] == 100);
    CHECK(!sweep.contains("truncation_analysis"));

    const auto manifest = Json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["command"] == "sweep");
    CHECK(manifest["axis"]["name"] == "max_steps");
    fs::remove_all(dir);
}

TEST_CASE("sweep axis validation") {
    const auto cfg = config_from_json(minimal_config());
    RunOptions opts;
    opts.quiet = true;

    CHECK(mentions(config_error_of([&] { run_sweep(cfg, SweepAxis{"sideways", {1.0}}, opts); }),
                   "unknown sweep axis"));
    CHECK(mentions(config_error_of([&] { run_sweep(cfg, SweepAxis{"max_steps", {}}, opts); }),
                   "at least one value"));
    CHECK(mentions(config_error_of([&] { run_sweep(cfg, SweepAxis{"max_steps", {2.5}}, opts); }),
                   "nonnegative integers"));
    CHECK(mentions(
        config_error_of([&] { run_sweep(cfg, SweepAxis{"max_steps", {4.0, 4.0}}, opts); }),
        "distinct"));
    CHECK(mentions(config_error_of([&] { run_sweep(cfg, SweepAxis{"truncation", {0.0}}, opts); }),
                   "seed axis"));
    // the seed axis needs a reseedable matrix
    CHECK(mentions(config_error_of([&] { run_sweep(cfg, SweepAxis{"seed", {1.0, 2.0}}, opts); }),
                   "random matrix"));
}

} // TEST_SUITE
