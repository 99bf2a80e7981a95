#include "solitrain/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "solitrain/error.hpp"
#include "solitrain/exports.hpp"
#include "solitrain/run_config.hpp"
#include "solitrain/selftest.hpp"

namespace solitrain::cli {

using nlohmann::json;
namespace fs = std::filesystem;

fs::path default_out_dir() {
  if (const char* env = std::getenv("SOLITRAIN_OUT_DIR"); env && *env) return env;
  return "solitrain-out";
}

SimConfig default_config_for(Operation op) {
  if (op == Operation::method_b) return method_b_defaults();
  if (op == Operation::signed_mul) return attractive_defaults();
  return {};
}

SimConfig default_config_for(Branch branch) { return branch == Branch::ra ? attractive_defaults() : SimConfig{}; }

std::vector<double> s_range(double start, double stop, double step) {
  if (!(step > 0.0)) throw ValidationError("s range step must be positive");
  if (!(stop >= start)) throw ValidationError("s range stop must be >= start");
  std::vector<double> out;
  const auto n = static_cast<long long>(std::floor((stop - start) / step + 1e-6));
  for (long long k = 0; k <= n; ++k) out.push_back(start + static_cast<double>(k) * step);
  return out;
}

namespace {

SimConfig load_or_default(const std::optional<fs::path>& path, const SimConfig& base) {
  return path ? load_run_config(*path, base).sim : base;
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream&) {
  const auto rc = load_run_config(opt.config);
  if (!rc.schedule) throw ValidationError("config: schedule: simulate needs a schedule section");
  const auto& config = rc.sim;
  const auto& sched = *rc.schedule;
  const Grid grid = config.grid.make();
  const auto traj = evolve(init_uniform(grid, config.n0, sched.component_count()), sched, config.probed_evolution());

  SimulationOutput result{&traj, {}, {}, config.detector.resolved_window(config.evolution.t_final), fingerprint(config)};
  for (std::size_t i = 0; i < traj.component_count(); ++i) {
    result.logs.push_back(detect_events(traj, i, config.detector, config.evolution.t_final));
    result.measurements.push_back(measure_frequency(result.logs.back(), config.detector, config.evolution.t_final));
  }
  const auto files = write_simulation(opt.out, result, {opt.binary});
  for (std::size_t i = 0; i < result.measurements.size(); ++i) {
    const auto& m = result.measurements[i];
    out << "component " << i << ": f = " << fixed(m.f) << " (" << m.count << " events in window)\n";
  }
  out << "wrote " << files.size() << " files to " << opt.out.string() << '\n';
  return ExitCode::ok;
}

int cmd_calibrate(const CalibrateOptions& opt, std::ostream& out, std::ostream& err) {
  if (opt.s_values.empty()) throw ValidationError("calibrate needs --s-list or --s-range");
  const SimConfig config = load_or_default(opt.config, default_config_for(opt.branch));
  auto samples = sweep(opt.s_values, opt.branch, config, opt.jobs);
  CalibrationTable table;
  try {
    table = assemble_table(samples, opt.branch, config);
  } catch (const CalibrationError& e) {
    err << "calibration failed: " << e.what() << "\nraw sweep:\ns,f\n";
    for (const auto& s : samples) err << format_double(s.s) << ',' << (s.f ? format_double(*s.f) : "nan") << '\n';
    return ExitCode::numerical;
  }
  if (opt.out.has_parent_path()) fs::create_directories(opt.out.parent_path());
  save_table(table, opt.out);
  out << format_table(table);
  out << "wrote " << opt.out.string() << '\n';
  return ExitCode::ok;
}

json report_to_json(const ComputationPlan& plan, const ComputationResult& r, const SimConfig& config) {
  json diag{{"blow_up", r.diagnostics.blow_up},
            {"blowup_time", optional_json(r.diagnostics.blowup_time)},
            {"event_count", r.diagnostics.event_count},
            {"s_eff_used", optional_json(r.diagnostics.s_eff_used)},
            {"decode_out_of_range", r.decode_out_of_range}};
  json j{{"operation", to_string(plan.operation)},
         {"operands", plan.operands},
         {"branch", to_string(plan.branch)},
         {"schedule", schedule_to_json(plan.schedule)},
         {"s_eff", optional_json(plan.expected_s_eff)},
         {"expected_value", optional_json(plan.expected_value)},
         {"f", measurement_to_json(r.f_measured)},
         {"decoded", optional_json(r.decoded)},
         {"indicative", r.indicative},
         {"order_check", r.order_check},
         {"diagnostics", diag},
         {"note", r.note},
         {"fingerprint", fingerprint(config)},
         {"config", sim_config_to_json(config)}};
  if (r.reference_self) j["reference_self"] = measurement_to_json(*r.reference_self);
  if (r.reference_phase) j["reference_phase"] = measurement_to_json(*r.reference_phase);
  return j;
}

int cmd_compute(const ComputeOptions& opt, std::ostream& out, std::ostream& err) {
  const SimConfig config = load_or_default(opt.config, default_config_for(opt.op));
  const auto plan = compile_plan(opt.op, opt.operands, opt.gR, config.crit);

  std::optional<CalibrationTable> table;
  if (opt.table) {
    std::string warnings;
    table = load_table(*opt.table, fingerprint(config), opt.strict, &warnings);
    if (!warnings.empty()) err << "warning: " << warnings << '\n';
  }
  const auto result = run_plan(plan, table ? &*table : nullptr, config, opt.strict);
  write_json(opt.report, report_to_json(plan, result, config));

  out << to_string(plan.operation);
  for (double v : plan.operands) out << ' ' << format_double(v);
  if (plan.expected_s_eff) out << "\n  s_eff = " << fixed(*plan.expected_s_eff);
  out << "\n  f = " << fixed(result.f_measured.f) << " (" << result.f_measured.count << " events)";
  if (result.reference_self) out << "\n  f(self only) = " << fixed(result.reference_self->f);
  if (result.reference_phase) out << "\n  f(phase only) = " << fixed(result.reference_phase->f);
  if (result.decoded) out << "\n  decoded = " << fixed(*result.decoded) << (result.indicative ? " (indicative)" : "");
  if (plan.expected_value) out << "\n  expected = " << fixed(*plan.expected_value);
  out << "\n  order_check = " << (result.order_check ? "true" : "false");
  if (!result.note.empty()) out << "\n  note: " << result.note;
  out << "\n  report: " << opt.report.string() << '\n';

  if (result.diagnostics.blow_up) return ExitCode::numerical;
  if (result.decode_out_of_range) return ExitCode::decode_range;
  return ExitCode::ok;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Soliton-train computing simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "solitrain 0.1.0");

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Evolve a configured schedule and export densities and events");
  simulate->add_option("config", sim.config, "Run config (JSON with comments)")->required()->check(CLI::ExistingFile);
  std::string sim_out;
  simulate->add_option("--out", sim_out, "Output directory");
  simulate->add_flag("--binary", sim.binary, "Also write raw little-endian f64 density matrices");

  CalibrateOptions cal;
  std::string branch = "r", cal_out, cal_config;
  std::vector<double> s_list, s_rng;
  auto* calibrate_cmd = app.add_subcommand("calibrate", "Sweep ratios and write a calibration table");
  calibrate_cmd->add_option("--branch", branch, "r or ra")->check(CLI::IsMember({"r", "ra"}));
  auto* list_opt = calibrate_cmd->add_option("--s-list", s_list, "Comma-separated ratios")->delimiter(',');
  calibrate_cmd->add_option("--s-range", s_rng, "start stop step")->expected(3)->excludes(list_opt);
  calibrate_cmd->add_option("--config", cal_config, "Run config")->check(CLI::ExistingFile);
  calibrate_cmd->add_option("--out", cal_out, "Table file");
  calibrate_cmd->add_option("--jobs,-j", cal.jobs, "Worker threads (0 = all cores)");

  ComputeOptions comp;
  std::string op_name, comp_table, comp_config, comp_report;
  bool no_strict = false;
  auto* compute = app.add_subcommand("compute", "Compile an arithmetic plan, simulate it and decode the result");
  compute->add_option("--op", op_name, "store|add|mul|sum3|scale|invert|signed-mul|method-b")->required();
  compute->add_option("operands", comp.operands, "Operands")->required();
  compute->add_option("--table", comp_table, "Calibration table")->check(CLI::ExistingFile);
  compute->add_option("--config", comp_config, "Run config")->check(CLI::ExistingFile);
  compute->add_option("--report", comp_report, "Report file (JSON)");
  compute->add_flag("--no-strict", no_strict, "Warn instead of failing on a table fingerprint mismatch");
  compute->add_option("--gR", comp.gR, "Right-side self interaction");

  SelftestOptions st;
  auto* selftest = app.add_subcommand("selftest", "Run conservation, oracle, reduction, convergence and absorber checks");
  selftest->add_option("--dt", st.dt, "Time step under test");
  selftest->add_option("--horizon", st.horizon, "Horizon of the conservation and oracle checks");

  std::string fp_config, fp_op;
  auto* fp = app.add_subcommand("fingerprint", "Print the fingerprint of a config");
  fp->add_option("--config", fp_config, "Run config")->check(CLI::ExistingFile);
  fp->add_option("--op", fp_op, "Operation whose default config applies");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ExitCode::ok : ExitCode::validation;
  }

  try {
    if (*simulate) {
      sim.out = sim_out.empty() ? default_out_dir() : fs::path(sim_out);
      return cmd_simulate(sim, out, err);
    }
    if (*calibrate_cmd) {
      cal.branch = branch_from_string(branch.c_str());
      cal.s_values = s_rng.empty() ? s_list : s_range(s_rng[0], s_rng[1], s_rng[2]);
      if (!cal_config.empty()) cal.config = cal_config;
      cal.out = cal_out.empty() ? default_out_dir() / ("table_" + branch + ".csv") : fs::path(cal_out);
      return cmd_calibrate(cal, out, err);
    }
    if (*compute) {
      comp.op = operation_from_string(op_name);
      if (!comp_table.empty()) comp.table = comp_table;
      if (!comp_config.empty()) comp.config = comp_config;
      comp.strict = !no_strict;
      comp.report = comp_report.empty() ? default_out_dir() / (std::string("report_") + to_string(comp.op) + ".json")
                                        : fs::path(comp_report);
      return cmd_compute(comp, out, err);
    }
    if (*selftest) return run_selftest(st, out) ? ExitCode::ok : ExitCode::numerical;
    if (*fp) {
      const SimConfig base = fp_op.empty() ? SimConfig{} : default_config_for(operation_from_string(fp_op));
      out << fingerprint(fp_config.empty() ? base : load_run_config(fp_config, base).sim) << '\n';
      return ExitCode::ok;
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::validation;
  } catch (const DecodeRangeError& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::decode_range;
  } catch (const BlowUpError& e) {
    err << "error: numerical blow-up at t = " << e.time() << ": " << e.what() << '\n';
    return ExitCode::numerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::numerical;
  }
  return ExitCode::validation;
}

}  // namespace solitrain::cli
