#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "solitrain/detection.hpp"
#include "solitrain/evolution.hpp"
#include "solitrain/protocol.hpp"

namespace solitrain {

struct GridSpec {
  std::size_t n_points = 4096;
  double length = 400.0;
  double z_min = -200.0;

  Grid make() const { return make_grid(n_points, length, z_min); }
};

// Everything needed to turn a schedule into a frequency measurement.
struct SimConfig {
  GridSpec grid;
  double n0 = 1.0;
  EvolutionConfig evolution;
  DetectorConfig detector;
  CritConstants crit;

  // Throws ValidationError naming the first offending field.
  void validate() const;
  // The evolution config with its probe placed at the detector.
  EvolutionConfig probed_evolution() const;
};

// Defaults for Method B runs: the phase-only train forms late, so the
// horizon is doubled relative to the interaction quench defaults.
SimConfig method_b_defaults();
// Defaults for attractive-branch (ra) calibration: short horizon.
SimConfig attractive_defaults();

// Stable 64-bit FNV-1a hash of the grid, time stepping and detector settings,
// rendered as 16 hex digits.
std::string fingerprint(const SimConfig& config);
std::uint64_t fnv1a64(const std::string& text);

struct ScheduleRun {
  Trajectory trajectory;
  SolitonEventLog log;
  FrequencyMeasurement measurement;
  bool blow_up = false;
};

// Uniform init -> evolve -> detect on `component` -> measure.
ScheduleRun run_schedule(const StepSchedule& schedule, const SimConfig& config, std::size_t component = 0);

// Frequency only; drops the trajectory.
FrequencyMeasurement measure_schedule(const StepSchedule& schedule, const SimConfig& config,
                                      bool* blow_up = nullptr);

}  // namespace solitrain
