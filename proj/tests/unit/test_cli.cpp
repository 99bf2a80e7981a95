#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "solitrain/commands.hpp"
#include "solitrain/error.hpp"
#include "solitrain/exports.hpp"
#include "solitrain/run_config.hpp"
#include "solitrain/selftest.hpp"
#include "support.hpp"

using namespace solitrain;
using namespace solitrain::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("solitrain_cli_" + name);
  fs::remove_all(p);
  return p;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream os(p);
  os << text;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "solitrain");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

const char* kSmall = R"({
  // small grid used throughout
  "grid": { "n_points": 1024, "L": 100, "z_min": -50 },
  "evolution": { "t_final": 2, "record_stride": 400 },
  /* probe */
  "detector": { "z_d": 10, "background_window": 10, "min_separation": 0.5 },
  "schedule": { "N": 1, "self": { "left": 3.0, "right": 1.0 } }
})";

}  // namespace

TEST_CASE("run config with comments and partial sections") {
  const auto rc = parse_run_config(kSmall);
  CHECK(rc.sim.grid.n_points == 1024);
  CHECK(rc.sim.grid.length == 100.0);
  CHECK(rc.sim.evolution.t_final == 2.0);
  CHECK(rc.sim.evolution.dt == EvolutionConfig{}.dt);
  REQUIRE(rc.schedule);
  CHECK(rc.schedule->self(0) == StepProfile{3.0, 1.0});
  const auto empty = parse_run_config("{}");
  CHECK(fingerprint(empty.sim) == fingerprint(SimConfig{}));
  CHECK_FALSE(empty.schedule);
}

TEST_CASE("config errors name the offending key") {
  auto fails_with = [](const std::string& text, const std::string& needle) {
    try {
      parse_run_config(text);
    } catch (const ValidationError& e) {
      const std::string msg = e.what();
      INFO(msg);
      return msg.find(needle) != std::string::npos;
    }
    return false;
  };
  CHECK(fails_with(R"({"gird": {}})", "gird"));
  CHECK(fails_with(R"({"grid": {"points": 10}})", "grid.points"));
  CHECK(fails_with(R"({"grid": {"n_points": 1000}})", "grid"));
  CHECK(fails_with(R"({"evolution": {"dt": 0.5}})", "evolution.dt"));
  CHECK(fails_with(R"({"evolution": {"dt": "small"}})", "evolution.dt"));
  CHECK(fails_with(R"({"evolution": {"absorber": {"enabled": true, "width": 150}}})", "evolution.absorber.width"));
  CHECK(fails_with(R"({"evolution": {"absorber": {"on": true}}})", "evolution.absorber.on"));
  CHECK(fails_with(R"({"detector": {"depth_fraction": 1.5}})", "detector.depth_fraction"));
  CHECK(fails_with(R"({"detector": {"window": [30, 10]}})", "detector.window"));
  CHECK(fails_with(R"({"detector": {"z_d": 0}})", "detector.z_d"));
  CHECK(fails_with(R"({"crit": {"c_up": 0.5}})", "crit"));
  CHECK(fails_with(R"({"schedule": {"self": {"left": 1, "right": 1}}})", "schedule.N"));
  CHECK(fails_with(R"({"schedule": {"N": 2, "self": [{"left": 1, "right": 1}, {"left": 1}]}})", "schedule.self[1]"));
  CHECK(fails_with(R"({"schedule": {"N": 2, "self": {"left": 1, "right": 1}, "cross": [{"i": 0, "j": 2, "left": 1, "right": 0}]}})",
                   "schedule.cross[0]"));
  CHECK(fails_with(R"({"schedule": {"N": 1, "self": {"left": 1, "right": 1}, "phase": {"left": 1, "rite": 0}}})",
                   "schedule.phase.rite"));
  CHECK(fails_with("{ not json", "malformed"));
}

TEST_CASE("window resets with a new horizon unless given") {
  auto rc = parse_run_config(R"({"evolution": {"t_final": 100}})", attractive_defaults());
  CHECK(rc.sim.detector.resolved_window(100).t_start == 40.0);
  CHECK(rc.sim.detector.z_d == -10.0);
  rc = parse_run_config(R"({"evolution": {"t_final": 100}, "detector": {"window": [50, 90]}})");
  CHECK(rc.sim.detector.resolved_window(100).t_start == 50.0);
}

TEST_CASE("schedule json round trip (property)") {
  testing::Gen gen(91);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = static_cast<std::size_t>(gen.integer(1, 4));
    StepSchedule s(n);
    for (std::size_t i = 0; i < n; ++i) {
      s.set_self(i, {gen.uniform(0, 5), gen.uniform(0.1, 2)});
      s.set_phase(i, {gen.uniform(0, 1), gen.uniform(0, 1)});
      for (std::size_t j = i + 1; j < n; ++j)
        if (gen.coin()) s.set_cross(i, j, {gen.uniform(0, 1), gen.uniform(0, 1)});
    }
    const auto back = schedule_from_json(nlohmann::json::parse(schedule_to_json(s).dump()));
    REQUIRE(back.component_count() == n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(back.self(i) == s.self(i));
      CHECK(back.phase(i) == s.phase(i));
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) CHECK(back.cross(i, j) == s.cross(i, j));
    }
  }
}

TEST_CASE("s ranges include the end point") {
  const auto r = s_range(2.4, 4.0, 0.4);
  REQUIRE(r.size() == 5);
  CHECK(r.back() == doctest::Approx(4.0));
  CHECK(s_range(1.0, 1.0, 0.1).size() == 1);
  CHECK_THROWS_AS(s_range(1.0, 2.0, 0.0), ValidationError);
  CHECK_THROWS_AS(s_range(3.0, 2.0, 0.1), ValidationError);
}

TEST_CASE("number formatting round trips") {
  testing::Gen gen(97);
  for (int trial = 0; trial < 500; ++trial) {
    const double v = gen.uniform(-1e3, 1e3) * std::pow(10.0, gen.integer(-20, 20));
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(NAN) == "nan");
}

TEST_CASE("simulate exports are complete and reproducible") {
  const auto dir = scratch("sim");
  fs::create_directories(dir);
  write_text(dir / "cfg.json", kSmall);
  std::string out;
  REQUIRE(run({"simulate", (dir / "cfg.json").string(), "--out", (dir / "a").string(), "--binary"}, &out) == 0);
  CHECK(out.find("component 0") != std::string::npos);
  for (const char* f : {"density_0.csv", "density_0.f64", "density_0.hdr", "times.csv", "grid.csv", "line_0.csv",
                        "events_0.csv", "frequency.json"})
    CHECK(fs::exists(dir / "a" / f));

  const auto csv = read_text(dir / "a" / "density_0.csv");
  std::istringstream lines(csv);
  std::string header, first;
  std::getline(lines, header);
  std::getline(lines, first);
  CHECK(header.rfind("t,-49.95", 0) == 0);
  CHECK(std::count(header.begin(), header.end(), ',') == 1024);
  CHECK(first.rfind("0,1,1,", 0) == 0);
  // 2 / (5e-4 * 400) = 10 intervals -> 11 rows plus the header.
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 12);
  CHECK(fs::file_size(dir / "a" / "density_0.f64") == 11 * 1024 * 8);
  const auto hdr = read_text(dir / "a" / "density_0.hdr");
  CHECK(hdr.find("n_rows 11\n") != std::string::npos);
  CHECK(hdr.find("n_cols 1024\n") != std::string::npos);
  CHECK(hdr.find("dt_record 0.2\n") != std::string::npos);
  CHECK(read_text(dir / "a" / "events_0.csv").rfind("t,depth,width\n", 0) == 0);

  REQUIRE(run({"simulate", (dir / "cfg.json").string(), "--out", (dir / "b").string(), "--binary"}) == 0);
  for (const auto& entry : fs::directory_iterator(dir / "a"))
    CHECK(read_text(entry.path()) == read_text(dir / "b" / entry.path().filename()));
  fs::remove_all(dir);
}

TEST_CASE("no-quench export is constant") {
  const auto dir = scratch("flat");
  fs::create_directories(dir);
  write_text(dir / "cfg.json", R"({"grid": {"n_points": 1024, "L": 100, "z_min": -50},
    "evolution": {"t_final": 1, "record_stride": 500},
    "detector": {"background_window": 10},
    "schedule": {"N": 1, "self": {"left": 1, "right": 1}}})");
  REQUIRE(run({"simulate", (dir / "cfg.json").string(), "--out", (dir / "o").string()}) == 0);
  std::istringstream lines(read_text(dir / "o" / "density_0.csv"));
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line)) {
    std::istringstream cells(line);
    std::string cell;
    std::getline(cells, cell, ',');
    while (std::getline(cells, cell, ',')) CHECK(std::abs(std::stod(cell) - 1.0) < 1e-12);
  }
  fs::remove_all(dir);
}

TEST_CASE("env var sets the default output directory") {
  const auto dir = scratch("env");
  ::setenv("SOLITRAIN_OUT_DIR", dir.string().c_str(), 1);
  CHECK(default_out_dir() == dir);
  ::unsetenv("SOLITRAIN_OUT_DIR");
  CHECK(default_out_dir() == fs::path("solitrain-out"));
}

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  fs::create_directories(dir);
  std::string out, err;
  CHECK(run({}, &out, &err) == 1);
  CHECK(run({"frobnicate"}) == 1);
  CHECK(run({"--help"}, &out) == 0);
  CHECK(run({"compute", "--op", "divide", "1", "2", "--report", (dir / "r.json").string()}, &out, &err) == 1);
  CHECK(err.find("unknown operation") != std::string::npos);
  write_text(dir / "bad.json", R"({"detector": {"spam": 1}})");
  CHECK(run({"simulate", (dir / "bad.json").string()}, &out, &err) == 1);
  CHECK(err.find("detector.spam") != std::string::npos);
  CHECK(run({"simulate", (dir / "missing.json").string()}) == 1);

  // Blow-up: a strongly attractive left side without truncation.
  write_text(dir / "boom.json", R"({"grid": {"n_points": 1024, "L": 100, "z_min": -50},
    "evolution": {"t_final": 20, "blowup_factor": 3},
    "detector": {"background_window": 10},
    "schedule": {"N": 1, "self": {"left": -20, "right": 1}}})");
  CHECK(run({"simulate", (dir / "boom.json").string(), "--out", (dir / "boom").string()}, &out, &err) == 2);
  CHECK(err.find("blow-up") != std::string::npos);

  // Decode out of range: a table that tops out at a tiny frequency.
  const auto small = testing::small_config();
  write_text(dir / "small.json", R"({"grid": {"n_points": 1024, "L": 100, "z_min": -50},
    "evolution": {"t_final": 25}, "detector": {"background_window": 10}})");
  CalibrationTable t{Branch::r, {{2.2, 0.0}, {2.4, 1e-3}}, {}, fingerprint(small)};
  save_table(t, dir / "t.csv");
  CHECK(run({"compute", "--op", "store", "2.0", "--table", (dir / "t.csv").string(), "--config",
             (dir / "small.json").string(), "--report", (dir / "r.json").string()},
            &out, &err) == 3);
  const auto report = nlohmann::json::parse(read_text(dir / "r.json"));
  CHECK(report["decoded"].is_null());
  CHECK(report["diagnostics"]["decode_out_of_range"] == true);
  CHECK(report["fingerprint"] == fingerprint(small));
  CHECK(report["s_eff"].get<double>() == doctest::Approx(4.2));
  for (const char* key : {"operands", "schedule", "f", "order_check", "diagnostics"}) CHECK(report.contains(key));

  // Fingerprint mismatch is a validation error unless relaxed.
  CHECK(run({"compute", "--op", "store", "2.0", "--table", (dir / "t.csv").string(), "--report",
             (dir / "r2.json").string()},
            &out, &err) == 1);
  CHECK(err.find("fingerprint") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("calibrate writes a table and fails loudly on a bad sweep") {
  const auto dir = scratch("cal");
  fs::create_directories(dir);
  write_text(dir / "small.json", R"({"grid": {"n_points": 1024, "L": 100, "z_min": -50},
    "evolution": {"t_final": 25}, "detector": {"background_window": 10}})");
  std::string out, err;
  REQUIRE(run({"calibrate", "--branch", "r", "--s-list", "1.0", "--config", (dir / "small.json").string(), "--out",
               (dir / "t.csv").string()},
              &out, &err) == 0);
  const auto t = load_table(dir / "t.csv");
  REQUIRE(t.samples.size() == 1);
  CHECK(*t.samples[0].f == 0.0);
  CHECK(t.fingerprint == fingerprint(testing::small_config()));
  CHECK(run({"calibrate", "--s-list", "3.0,2.0", "--config", (dir / "small.json").string(), "--out",
             (dir / "t2.csv").string()},
            &out, &err) == 1);
  // Subcritical crit constants force a violation of the table invariants.
  write_text(dir / "crit.json", R"({"grid": {"n_points": 1024, "L": 100, "z_min": -50},
    "evolution": {"t_final": 25}, "detector": {"background_window": 10}, "crit": {"c_up": 5.0}})");
  CHECK(run({"calibrate", "--s-list", "3.0", "--config", (dir / "crit.json").string(), "--out",
             (dir / "t3.csv").string()},
            &out, &err) == 2);
  CHECK(err.find("raw sweep") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "t3.csv"));
  fs::remove_all(dir);
}

TEST_CASE("norm monotonicity check flags a fabricated increase") {
  std::size_t at = 0;
  CHECK(norm_nonincreasing({3.0, 2.9, 2.9, 2.5}));
  CHECK_FALSE(norm_nonincreasing({3.0, 2.9, 2.95, 2.5}, &at));
  CHECK(at == 2);
  CHECK(norm_nonincreasing({}));
}

TEST_CASE("selftest checks fail on a broken time step") {
  SelftestOptions opt;
  opt.dt = 0.5;
  opt.grid = {1024, 100.0, -50.0};
  CHECK_FALSE(check_convergence(opt).passed);
  CHECK_FALSE(check_conservation(opt).passed);
}

TEST_CASE("shipped configs parse") {
  const fs::path root = SOLITRAIN_SOURCE_DIR;
  std::size_t count = 0;
  for (const auto& entry : fs::directory_iterator(root / "configs")) {
    INFO(entry.path().string());
    const auto rc = load_run_config(entry.path());
    CHECK(rc.schedule);
    ++count;
  }
  CHECK(count == 5);
  const auto example = load_run_config(root / "docs" / "example_config.json");
  REQUIRE(example.schedule);
  CHECK(example.schedule->component_count() == 2);
  CHECK(fingerprint(example.sim) == fingerprint(SimConfig{}));
}

TEST_CASE("combined config emits a faster train than either step alone") {
  const fs::path root = SOLITRAIN_SOURCE_DIR;
  const auto dir = scratch("figs");
  auto f_of = [&](const char* name) {
    const auto out = dir / name;
    REQUIRE(run({"simulate", (root / "configs" / (std::string(name) + ".json")).string(), "--out", out.string()}) == 0);
    return nlohmann::json::parse(read_text(out / "frequency.json"))["components"][0]["f"].get<double>();
  };
  const double f4 = f_of("interaction_step");
  const double f5 = f_of("phase_step");
  const double f6 = f_of("combined_step");
  CHECK(f6 > f4);
  CHECK(f6 > f5);
  // The interaction-step train is visible in the exported density matrix:
  // some snapshot dips below half the background at the probe.
  std::istringstream lines(read_text(dir / "interaction_step" / "density_0.csv"));
  std::string line;
  std::getline(lines, line);
  const std::size_t probe_col = make_grid(4096, 400.0, -200.0).nearest_index(10.0) + 1;
  double lowest = INFINITY;
  while (std::getline(lines, line)) {
    std::istringstream cells(line);
    std::string cell;
    for (std::size_t c = 0; c <= probe_col; ++c) std::getline(cells, cell, ',');
    lowest = std::min(lowest, std::stod(cell));
  }
  CHECK(lowest < 0.5);
  fs::remove_all(dir);
}
