#pragma once

#include <optional>
#include <string>
#include <vector>

#include "solitrain/calibration.hpp"
#include "solitrain/protocol.hpp"
#include "solitrain/simulation.hpp"

namespace solitrain {

enum class Operation { store, add, mul, sum3, scale, invert, signed_mul, method_b };

const char* to_string(Operation op) noexcept;
Operation operation_from_string(const std::string& name);

// Arithmetic request compiled to a schedule. expected_s_eff is set for every
// interaction-algebra operation and absent for method_b.
struct ComputationPlan {
  Operation operation = Operation::store;
  std::vector<double> operands;
  StepSchedule schedule{1};
  std::optional<double> expected_s_eff;
  Branch branch = Branch::r;
  // Value the plan encodes under the number <-> ratio convention.
  std::optional<double> expected_value;
};

// Operands per operation:
//   store a | add a b | mul M N | sum3 a b c | scale x factor | scale x c d |
//   invert k k1 k2 | signed_mul M N | method_b s theta_left
ComputationPlan compile_plan(Operation op, const std::vector<double>& operands, double gR = 1.0,
                             const CritConstants& crit = {});

struct ComputationDiagnostics {
  bool blow_up = false;
  std::optional<double> blowup_time;
  std::size_t event_count = 0;
  std::optional<double> s_eff_used;
};

struct ComputationResult {
  FrequencyMeasurement f_measured;
  std::optional<double> decoded;
  bool order_check = false;
  // Method B decodes through the branch-r table only as an indication.
  bool indicative = false;
  bool decode_out_of_range = false;
  ComputationDiagnostics diagnostics;
  // Method B reference frequencies: self-interaction only and phase only.
  std::optional<FrequencyMeasurement> reference_self;
  std::optional<FrequencyMeasurement> reference_phase;
  std::string note;
};

// Relative 5% (absolute 0.05 below magnitude 1) decode tolerance.
double decode_tolerance(double expected);

// Simulates plan.schedule from the uniform state and decodes component 0.
// With a table, its branch must match the plan and, when strict, its
// fingerprint the config.
ComputationResult run_plan(const ComputationPlan& plan, const CalibrationTable* table, const SimConfig& config,
                           bool strict = true);

// Phase-imprinting computation: s carries a, theta_left carries b.
ComputationResult run_method_b(double s, double theta_left, const SimConfig& config,
                               const CalibrationTable* table = nullptr);

// Runs the N-component plan and its single-equation reduction; true iff every
// snapshot of every component agrees to within `tol`.
bool verify_reduction(const ComputationPlan& plan, const SimConfig& config, double tol = 1e-8,
                      double* max_deviation = nullptr);

}  // namespace solitrain
