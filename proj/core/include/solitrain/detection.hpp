#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "solitrain/evolution.hpp"

namespace solitrain {

struct MeasureWindow {
  double t_start = 0.0;
  double t_end = 0.0;
};

struct DetectorConfig {
  double z_d = 10.0;
  // A dip counts when the density falls below depth_fraction * background.
  double depth_fraction = 0.6;
  // Spatial extent (centred on z_d) of the running-median background.
  double background_window = 20.0;
  double min_separation = 0.5;
  // Defaults to [0.4 t_final, t_final] when unset.
  std::optional<MeasureWindow> window;

  MeasureWindow resolved_window(double t_final) const;
  void validate(double t_final) const;
};

struct SolitonEvent {
  double t = 0.0;
  // Contrast 1 - rho_min / background.
  double depth = 0.0;
  // Full width at half depth, from the nearest snapshot.
  double width = 0.0;
};

struct SolitonEventLog {
  std::vector<SolitonEvent> events;
};

struct FrequencyMeasurement {
  double f = 0.0;
  std::size_t count = 0;
  // Standard deviation of inter-arrival times over their mean; absent for count <= 1.
  std::optional<double> jitter;
};

SolitonEventLog detect_events(const Trajectory& trajectory, std::size_t component,
                              const DetectorConfig& cfg, double t_final);

// Uses only events inside the measure window.
FrequencyMeasurement measure_frequency(const SolitonEventLog& log, const DetectorConfig& cfg,
                                       double t_final);

}  // namespace solitrain
