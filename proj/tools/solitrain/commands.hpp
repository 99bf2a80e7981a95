#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "solitrain/calculator.hpp"
#include "solitrain/calibration.hpp"
#include "solitrain/simulation.hpp"

namespace solitrain::cli {

enum ExitCode : int { ok = 0, validation = 1, numerical = 2, decode_range = 3 };

// Default output directory: $SOLITRAIN_OUT_DIR, else "solitrain-out".
std::filesystem::path default_out_dir();

struct SimulateOptions {
  std::filesystem::path config;
  std::filesystem::path out;
  bool binary = false;
};
int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err);

struct CalibrateOptions {
  Branch branch = Branch::r;
  std::vector<double> s_values;
  std::optional<std::filesystem::path> config;
  std::filesystem::path out;
  unsigned jobs = 0;
};
int cmd_calibrate(const CalibrateOptions& opt, std::ostream& out, std::ostream& err);

struct ComputeOptions {
  Operation op = Operation::add;
  std::vector<double> operands;
  std::optional<std::filesystem::path> table;
  std::optional<std::filesystem::path> config;
  std::filesystem::path report;
  bool strict = true;
  double gR = 1.0;
};
int cmd_compute(const ComputeOptions& opt, std::ostream& out, std::ostream& err);

// Default config for an operation or branch when no file is given.
SimConfig default_config_for(Operation op);
SimConfig default_config_for(Branch branch);

// s values start, start+step, ... up to stop (inclusive, within step/1e6).
std::vector<double> s_range(double start, double stop, double step);

nlohmann::json report_to_json(const ComputationPlan& plan, const ComputationResult& result, const SimConfig& config);

// Full command line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace solitrain::cli
