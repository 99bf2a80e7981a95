#include "solitrain/calculator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "solitrain/error.hpp"

namespace solitrain {

namespace {
constexpr struct {
  Operation op;
  const char* name;
} kOperationNames[] = {
    {Operation::store, "store"}, {Operation::add, "add"},       {Operation::mul, "mul"},
    {Operation::sum3, "sum3"},   {Operation::scale, "scale"},   {Operation::invert, "invert"},
    {Operation::signed_mul, "signed-mul"}, {Operation::method_b, "method-b"},
};

void require_operands(Operation op, const std::vector<double>& v, std::size_t lo, std::size_t hi) {
  if (v.size() < lo || v.size() > hi) {
    std::ostringstream msg;
    msg << "operation " << to_string(op) << " takes " << lo;
    if (hi != lo) msg << " or " << hi;
    msg << " operands, got " << v.size();
    throw ValidationError(msg.str());
  }
}

std::size_t as_count(double v, const char* what) {
  if (!(v >= 1.0) || v != std::floor(v) || v > 64.0) {
    throw ValidationError(std::string(what) + " must be a positive integer (at most 64)");
  }
  return static_cast<std::size_t>(v);
}
}  // namespace

const char* to_string(Operation op) noexcept {
  for (const auto& e : kOperationNames)
    if (e.op == op) return e.name;
  return "?";
}

Operation operation_from_string(const std::string& name) {
  std::string key = name;
  std::replace(key.begin(), key.end(), '_', '-');
  for (const auto& e : kOperationNames)
    if (key == e.name) return e.op;
  throw ValidationError("unknown operation '" + name + "'");
}

ComputationPlan compile_plan(Operation op, const std::vector<double>& x, double gR, const CritConstants& crit) {
  ComputationPlan plan;
  plan.operation = op;
  plan.operands = x;
  switch (op) {
    case Operation::store:
      require_operands(op, x, 1, 1);
      plan.schedule = make_quench(encode(x[0], Branch::r, crit), gR);
      plan.expected_value = x[0];
      break;
    case Operation::add:
      require_operands(op, x, 2, 2);
      plan.schedule = plan_add(x[0], x[1], gR, crit);
      plan.expected_value = x[0] + x[1];
      break;
    case Operation::mul: {
      require_operands(op, x, 2, 2);
      const auto n = as_count(x[1], "factor N");
      plan.schedule = plan_mul(x[0], n, gR, crit);
      plan.expected_value = x[0] * static_cast<double>(n);
      break;
    }
    case Operation::sum3:
      require_operands(op, x, 3, 3);
      plan.schedule = plan_sum3(x[0], x[1], x[2], gR, crit);
      plan.expected_value = x[0] + x[1] + x[2];
      break;
    case Operation::scale: {
      require_operands(op, x, 2, 3);
      const ScaleParameters p = x.size() == 2 ? canonical_scale(x[1]) : ScaleParameters{x[1], x[2]};
      plan.schedule = plan_scale(x[0] * gR, p.c, p.d, gR, crit);
      plan.expected_value = p.factor() * x[0];
      break;
    }
    case Operation::invert:
      require_operands(op, x, 3, 3);
      plan.schedule = plan_invert(x[0], {x[1], x[2]}, gR, crit);
      plan.expected_value = 1.0 / x[0];
      break;
    case Operation::signed_mul: {
      require_operands(op, x, 2, 2);
      const auto n = as_count(x[1], "factor N");
      plan.schedule = plan_signed_mul(x[0], n, gR, crit);
      plan.branch = Branch::ra;
      plan.expected_value = -x[0] * static_cast<double>(n);
      break;
    }
    case Operation::method_b:
      require_operands(op, x, 2, 2);
      if (!(x[0] >= 1.0)) throw ValidationError("method-b ratio s must be >= 1");
      if (!(x[1] >= 0.0)) throw ValidationError("method-b phase theta_left must be >= 0");
      plan.schedule = make_phase_quench(x[0], x[1], 0.0, gR);
      return plan;
  }
  plan.schedule.validate(true);
  plan.expected_s_eff = effective_ratio(plan.schedule, 0).value;
  return plan;
}

double decode_tolerance(double expected) { return std::abs(expected) < 1.0 ? 0.05 : 0.05 * std::abs(expected); }

namespace {
void check_table(const CalibrationTable& table, Branch branch, const SimConfig& config, bool strict) {
  if (table.branch != branch) {
    throw ValidationError(std::string("calibration table is for branch ") + to_string(table.branch) +
                          " but the plan needs branch " + to_string(branch));
  }
  if (strict && table.fingerprint != fingerprint(config)) {
    throw FingerprintMismatch("calibration table fingerprint " + table.fingerprint +
                              " does not match the simulator config " + fingerprint(config));
  }
}

bool order_applies(Operation op) {
  return op == Operation::add || op == Operation::mul || op == Operation::sum3;
}
}  // namespace

ComputationResult run_plan(const ComputationPlan& plan, const CalibrationTable* table, const SimConfig& config,
                           bool strict) {
  if (plan.operation == Operation::method_b) {
    return run_method_b(plan.operands.at(0), plan.operands.at(1), config, table);
  }
  if (table) check_table(*table, plan.branch, config, strict);

  SimConfig run_config = config;
  // Attractive-branch runs are cut at the first blow-up; events up to then count.
  if (plan.branch == Branch::ra) run_config.evolution.truncate_on_blowup = true;
  const auto run = run_schedule(plan.schedule, run_config);

  ComputationResult res;
  res.f_measured = run.measurement;
  res.diagnostics.blow_up = run.blow_up;
  res.diagnostics.blowup_time = run.trajectory.blowup_time;
  res.diagnostics.event_count = run.log.events.size();
  res.diagnostics.s_eff_used = plan.expected_s_eff;

  if (table && !run.blow_up) {
    try {
      double a = decode(res.f_measured.f, *table);
      if (plan.operation == Operation::signed_mul) a = -a;
      res.decoded = a;
    } catch (const DecodeRangeError& e) {
      res.decode_out_of_range = true;
      res.note = e.what();
    }
  } else if (run.blow_up) {
    res.note = "numerical blow-up; decoded value withheld";
  }
  if (res.decoded && order_applies(plan.operation)) {
    const double top = *std::max_element(plan.operands.begin(), plan.operands.end());
    res.order_check = *res.decoded >= top - decode_tolerance(top);
  }
  return res;
}

ComputationResult run_method_b(double s, double theta_left, const SimConfig& config, const CalibrationTable* table) {
  if (!(s >= 1.0)) throw ValidationError("method-b ratio s must be >= 1");
  if (!(theta_left >= 0.0)) throw ValidationError("method-b phase theta_left must be >= 0");
  if (table && table->branch != Branch::r) throw ValidationError("method-b decodes against a branch-r table");

  const auto both = run_schedule(make_phase_quench(s, theta_left, 0.0), config);
  const auto self_only = measure_schedule(make_phase_quench(s, 0.0, 0.0), config);
  const auto phase_only = measure_schedule(make_phase_quench(1.0, theta_left, 0.0), config);

  ComputationResult res;
  res.f_measured = both.measurement;
  res.reference_self = self_only;
  res.reference_phase = phase_only;
  res.diagnostics.blow_up = both.blow_up;
  res.diagnostics.event_count = both.log.events.size();
  res.indicative = true;

  // Allowance: one inter-arrival standard deviation of each reference train.
  auto allowance = [](const FrequencyMeasurement& m) { return m.jitter ? m.f * *m.jitter : 0.0; };
  res.order_check = both.measurement.f >= self_only.f - allowance(self_only) &&
                    both.measurement.f >= phase_only.f - allowance(phase_only);
  if (table) {
    try {
      res.decoded = decode(both.measurement.f, *table);
      res.note = "method-b decoded value is indicative only";
      if (table->fingerprint != fingerprint(config)) res.note += " (table fingerprint differs from config)";
    } catch (const DecodeRangeError& e) {
      res.decode_out_of_range = true;
      res.note = e.what();
    }
  }
  return res;
}

bool verify_reduction(const ComputationPlan& plan, const SimConfig& config, double tol, double* max_deviation) {
  const auto& sched = plan.schedule;
  if (sched.component_count() < 2) {
    throw ValidationError("verify_reduction needs a plan with at least two components");
  }
  // Identical initial components under an asymmetric schedule would diverge.
  const auto single = reduced_schedule(sched);
  config.validate();
  const Grid grid = config.grid.make();
  const auto evo = config.probed_evolution();
  const auto multi = evolve(init_uniform(grid, config.n0, sched.component_count()), sched, evo);
  const auto reduced = evolve(init_uniform(grid, config.n0, 1), single, evo);

  double worst = 0.0;
  const auto& ref = reduced.density_records[0];
  for (std::size_t i = 0; i < multi.component_count(); ++i) {
    const auto& rec = multi.density_records[i];
    if (rec.size() != ref.size()) return false;
    for (std::size_t j = 0; j < rec.size(); ++j) worst = std::max(worst, std::abs(rec[j] - ref[j]));
  }
  if (max_deviation) *max_deviation = worst;
  return worst < tol;
}

}  // namespace solitrain
