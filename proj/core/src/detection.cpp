#include "solitrain/detection.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "solitrain/error.hpp"

namespace solitrain {

MeasureWindow DetectorConfig::resolved_window(double t_final) const {
  if (window) return *window;
  return {0.4 * t_final, t_final};
}

void DetectorConfig::validate(double t_final) const {
  if (!(depth_fraction > 0.0 && depth_fraction < 1.0)) {
    throw ValidationError("detector.depth_fraction must lie in (0, 1)");
  }
  if (!(background_window > 0.0)) throw ValidationError("detector.background_window must be positive");
  if (!(min_separation > 0.0)) throw ValidationError("detector.min_separation must be positive");
  const auto w = resolved_window(t_final);
  if (!(w.t_start < w.t_end && w.t_end <= t_final * (1.0 + 1e-12))) {
    throw ValidationError("detector.window must satisfy t_start < t_end <= t_final");
  }
  if (z_d == 0.0) throw ValidationError("detector.z_d must lie off the step at z = 0");
}

namespace {

double median_of(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

struct SpatialRange {
  std::size_t lo;
  std::size_t hi;  // inclusive
};

SpatialRange background_range(const Grid& grid, double z_d, double window) {
  const double z_lo = std::max(grid.z(0), z_d - 0.5 * window);
  const double z_hi = std::min(grid.z(grid.size() - 1), z_d + 0.5 * window);
  return {grid.nearest_index(z_lo), grid.nearest_index(z_hi)};
}

double half_depth_width(std::span<const double> snap, const Grid& grid, SpatialRange range,
                        std::size_t probe, double background) {
  // Deepest point of the snapshot near the probe, then walk out to half depth.
  std::size_t jmin = probe;
  for (std::size_t j = range.lo; j <= range.hi; ++j)
    if (snap[j] < snap[jmin]) jmin = j;
  const double level = 0.5 * (background + snap[jmin]);
  std::size_t left = jmin;
  while (left > range.lo && snap[left - 1] < level) --left;
  std::size_t right = jmin;
  while (right < range.hi && snap[right + 1] < level) ++right;
  return static_cast<double>(right - left + 1) * grid.dz();
}

}  // namespace

SolitonEventLog detect_events(const Trajectory& traj, std::size_t component, const DetectorConfig& cfg,
                              double t_final) {
  cfg.validate(t_final);
  if (component >= traj.component_count()) throw ValidationError("component index out of range");
  const std::size_t zi = traj.grid.nearest_index(cfg.z_d);
  if (zi != traj.probe_index) {
    std::ostringstream msg;
    msg << "detector z_d=" << cfg.z_d << " does not match the trajectory probe at z=" << traj.probe_z;
    throw ValidationError(msg.str());
  }
  const auto& series = traj.line_samples[component];
  const auto& t = traj.line_times;
  SolitonEventLog log;
  if (series.size() < 3) return log;
  const double line_dt = t[1] - t[0];
  if (cfg.min_separation < 5.0 * line_dt * (1.0 - 1e-9)) {
    std::ostringstream msg;
    msg << "line sampling too coarse: min_separation=" << cfg.min_separation
        << " spans fewer than 5 samples of spacing " << line_dt;
    throw ValidationError(msg.str());
  }
  const auto range = background_range(traj.grid, cfg.z_d, cfg.background_window);
  const auto win = cfg.resolved_window(t_final);

  // Background per snapshot, computed lazily.
  std::vector<std::optional<double>> bg_cache(traj.snapshot_count());
  auto background_at = [&](std::size_t k) {
    if (!bg_cache[k]) {
      const auto snap = traj.snapshot(component, k);
      bg_cache[k] = median_of(std::vector<double>(snap.begin() + static_cast<std::ptrdiff_t>(range.lo),
                                                  snap.begin() + static_cast<std::ptrdiff_t>(range.hi) + 1));
    }
    return *bg_cache[k];
  };

  for (std::size_t k = 1; k + 1 < series.size(); ++k) {
    if (t[k] < win.t_start || t[k] > win.t_end) continue;
    if (!(series[k] < series[k - 1] && series[k] <= series[k + 1])) continue;
    const std::size_t snap_idx = traj.nearest_snapshot(t[k]);
    const double bg = background_at(snap_idx);
    if (!(series[k] < cfg.depth_fraction * bg)) continue;
    SolitonEvent ev{t[k], 1.0 - series[k] / bg,
                    half_depth_width(traj.snapshot(component, snap_idx), traj.grid, range, zi, bg)};
    if (!log.events.empty() && ev.t - log.events.back().t < cfg.min_separation) {
      // Debounce: keep the deeper of two close minima.
      if (ev.depth > log.events.back().depth) log.events.back() = ev;
      continue;
    }
    log.events.push_back(ev);
  }
  return log;
}

FrequencyMeasurement measure_frequency(const SolitonEventLog& log, const DetectorConfig& cfg,
                                       double t_final) {
  const auto win = cfg.resolved_window(t_final);
  std::vector<double> times;
  for (const auto& e : log.events)
    if (e.t >= win.t_start && e.t <= win.t_end) times.push_back(e.t);
  FrequencyMeasurement m;
  m.count = times.size();
  if (m.count <= 1) return m;
  const double span = times.back() - times.front();
  m.f = static_cast<double>(m.count - 1) / span;
  const double mean = span / static_cast<double>(m.count - 1);
  double var = 0.0;
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double d = (times[k] - times[k - 1]) - mean;
    var += d * d;
  }
  var /= static_cast<double>(m.count - 1);
  m.jitter = std::sqrt(var) / mean;
  return m;
}

}  // namespace solitrain
