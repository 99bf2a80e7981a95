#include "solitrain/simulation.hpp"

#include <cstdio>
#include <sstream>

#include "solitrain/error.hpp"

namespace solitrain {

void SimConfig::validate() const {
  const Grid g = grid.make();
  if (!(n0 > 0.0)) throw ValidationError("initial.n0 must be positive");
  probed_evolution().validate(g);
  detector.validate(evolution.t_final);
  crit.validate();
}

EvolutionConfig SimConfig::probed_evolution() const {
  EvolutionConfig e = evolution;
  e.probe_z = detector.z_d;
  return e;
}

SimConfig method_b_defaults() {
  SimConfig c;
  c.evolution.t_final = 100.0;
  return c;
}

SimConfig attractive_defaults() {
  SimConfig c;
  c.evolution.t_final = 10.0;
  c.evolution.blowup_factor = 10.0;
  // For s < 1 the lower-interaction side, where the train is emitted, is z < 0.
  c.detector.z_d = -10.0;
  c.detector.min_separation = 0.2;
  return c;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fingerprint(const SimConfig& c) {
  std::ostringstream s;
  auto num = [&](const char* key, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    s << key << '=' << buf << ';';
  };
  const auto win = c.detector.resolved_window(c.evolution.t_final);
  s << "n_points=" << c.grid.n_points << ';';
  num("L", c.grid.length);
  num("z_min", c.grid.z_min);
  num("n0", c.n0);
  num("dt", c.evolution.dt);
  num("t_final", c.evolution.t_final);
  s << "record_stride=" << c.evolution.record_stride << ";line_stride=" << c.evolution.line_stride << ';';
  num("blowup_factor", c.evolution.blowup_factor);
  s << "absorber=" << (c.evolution.absorber.enabled ? 1 : 0) << ';';
  if (c.evolution.absorber.enabled) {
    num("absorber_width", c.evolution.absorber.width);
    num("absorber_strength", c.evolution.absorber.strength);
  }
  num("z_d", c.detector.z_d);
  num("depth_fraction", c.detector.depth_fraction);
  num("background_window", c.detector.background_window);
  num("min_separation", c.detector.min_separation);
  num("t_start", win.t_start);
  num("t_end", win.t_end);
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(s.str())));
  return hex;
}

ScheduleRun run_schedule(const StepSchedule& schedule, const SimConfig& config, std::size_t component) {
  config.validate();
  const Grid grid = config.grid.make();
  auto traj = evolve(init_uniform(grid, config.n0, schedule.component_count()), schedule,
                     config.probed_evolution());
  const bool blow_up = traj.blowup_time.has_value();
  auto log = detect_events(traj, component, config.detector, config.evolution.t_final);
  auto m = measure_frequency(log, config.detector, config.evolution.t_final);
  return {std::move(traj), std::move(log), m, blow_up};
}

FrequencyMeasurement measure_schedule(const StepSchedule& schedule, const SimConfig& config, bool* blow_up) {
  auto run = run_schedule(schedule, config);
  if (blow_up) *blow_up = run.blow_up;
  return run.measurement;
}

}  // namespace solitrain
