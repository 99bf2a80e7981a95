#include "solitrain/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "solitrain/error.hpp"

namespace solitrain {

std::size_t EvolutionConfig::step_count() const {
  return static_cast<std::size_t>(std::llround(t_final / dt));
}

void EvolutionConfig::validate(const Grid& grid) const {
  if (!(dt > 0.0 && dt <= 1e-2)) throw ValidationError("evolution.dt must satisfy 0 < dt <= 1e-2");
  if (!(t_final > 0.0) || !std::isfinite(t_final)) throw ValidationError("evolution.t_final must be positive");
  if (record_stride < 1) throw ValidationError("evolution.record_stride must be >= 1");
  if (line_stride < 1) throw ValidationError("evolution.line_stride must be >= 1");
  if (absorber.enabled) {
    if (!(absorber.width > 0.0 && absorber.width < grid.length() / 4.0)) {
      throw ValidationError("evolution.absorber.width must satisfy 0 < width < L/4");
    }
    if (!(absorber.strength >= 0.0)) throw ValidationError("evolution.absorber.strength must be >= 0");
  }
  if (!(blowup_factor > 1.0)) throw ValidationError("evolution.blowup_factor must exceed 1");
  grid.nearest_index(probe_z);
}

std::span<const double> Trajectory::snapshot(std::size_t component, std::size_t k) const {
  const std::size_t n = grid.size();
  return std::span<const double>(density_records.at(component)).subspan(k * n, n);
}

std::size_t Trajectory::nearest_snapshot(double t) const {
  if (times.empty()) throw ValidationError("trajectory has no density snapshots");
  const auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return 0;
  if (it == times.end()) return times.size() - 1;
  const auto hi = static_cast<std::size_t>(it - times.begin());
  return (t - times[hi - 1] <= times[hi] - t) ? hi - 1 : hi;
}

namespace {
std::vector<double> sample_profile(const Grid& grid, const StepProfile& p) {
  std::vector<double> v(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) v[j] = p.at(grid.z(j));
  return v;
}
}  // namespace

SplitStepPropagator::SplitStepPropagator(const Grid& grid, const StepSchedule& schedule, double dt)
    : grid_(grid),
      n_components_(schedule.component_count()),
      dt_(dt),
      cross_(schedule.component_count()),
      kinetic_(grid.size()),
      rho_(schedule.component_count(), std::vector<double>(grid.size())),
      local_(grid.size()),
      fft_(grid.size()) {
  schedule.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("time step must be positive");
  for (std::size_t i = 0; i < n_components_; ++i) {
    self_.push_back(sample_profile(grid, schedule.self(i)));
    phase_.push_back(sample_profile(grid, schedule.phase(i)));
    for (std::size_t j = 0; j < n_components_; ++j) {
      if (j == i) continue;
      const auto& p = schedule.cross(i, j);
      if (p.left != 0.0 || p.right != 0.0) cross_[i].push_back({j, sample_profile(grid, p)});
    }
  }
  const auto k = grid.wavenumbers();
  const double inv_n = 1.0 / static_cast<double>(grid.size());
  for (std::size_t m = 0; m < k.size(); ++m) kinetic_[m] = std::polar(inv_n, -k[m] * k[m] * dt);
}

namespace {

// Largest |phase| for which the truncated series below is exact to rounding:
// the first omitted terms are below 0.25^17 / 17! ~ 2e-25.
constexpr double kSeriesPhaseLimit = 0.25;

// psi_j <- psi_j * exp(-i * phase_j). Small angles use a Horner series so the
// loop vectorizes; anything larger falls back to std::polar.
void rotate(std::span<Complex> psi, std::span<const double> phase) {
  const std::size_t n = psi.size();
  double worst = 0.0;
  for (std::size_t j = 0; j < n; ++j) worst = std::max(worst, std::abs(phase[j]));
  if (!(worst <= kSeriesPhaseLimit)) {
    for (std::size_t j = 0; j < n; ++j) psi[j] *= std::polar(1.0, -phase[j]);
    return;
  }
  auto* a = reinterpret_cast<double*>(psi.data());
  for (std::size_t j = 0; j < n; ++j) {
    const double x = -phase[j];
    const double x2 = x * x;
    const double c =
        1.0 + x2 * (-1.0 / 2 + x2 * (1.0 / 24 + x2 * (-1.0 / 720 + x2 * (1.0 / 40320 +
        x2 * (-1.0 / 3628800 + x2 * (1.0 / 479001600 + x2 * (-1.0 / 87178291200.0 +
        x2 * (1.0 / 20922789888000.0))))))));
    const double sn =
        x * (1.0 + x2 * (-1.0 / 6 + x2 * (1.0 / 120 + x2 * (-1.0 / 5040 + x2 * (1.0 / 362880 +
        x2 * (-1.0 / 39916800 + x2 * (1.0 / 6227020800.0 + x2 * (-1.0 / 1307674368000.0))))))));
    const double re = a[2 * j], im = a[2 * j + 1];
    a[2 * j] = re * c - im * sn;
    a[2 * j + 1] = re * sn + im * c;
  }
}

}  // namespace

void SplitStepPropagator::local_step(SystemState& state, double tau) {
  const std::size_t n = grid_.size();
  // Cross terms use the densities at the start of the sub-step.
  for (std::size_t i = 0; i < n_components_; ++i) density_into(state.components[i].amplitudes, rho_[i]);
  for (std::size_t i = 0; i < n_components_; ++i) {
    const auto& g = self_[i];
    const auto& th = phase_[i];
    const auto& rho = rho_[i];
    for (std::size_t j = 0; j < n; ++j) local_[j] = g[j] * rho[j] + th[j];
    for (const auto& term : cross_[i]) {
      const auto& rp = rho_[term.partner];
      for (std::size_t j = 0; j < n; ++j) local_[j] += term.values[j] * rp[j];
    }
    for (std::size_t j = 0; j < n; ++j) local_[j] *= tau;
    rotate(state.components[i].amplitudes, local_);
  }
}

void SplitStepPropagator::kinetic_step(SystemState& state) {
  for (auto& c : state.components) apply_fourier_multiplier(fft_, c.amplitudes, kinetic_);
}

void SplitStepPropagator::check_state(const SystemState& state) const {
  if (state.component_count() != n_components_) {
    throw ValidationError("schedule component count does not match the state");
  }
  if (!(state.grid == grid_)) throw ValidationError("state grid does not match the propagator grid");
}

void SplitStepPropagator::check_blowup(const SystemState& state, double blowup_factor) const {
  const double limit = blowup_factor * blowup_factor * state.n0;
  for (const auto& c : state.components) {
    bool ok = true;
    for (const auto& a : c.amplitudes) ok &= (std::norm(a) <= limit);
    if (!ok) {
      std::ostringstream msg;
      msg << "numerical blow-up at t=" << state.t;
      throw BlowUpError(msg.str(), state.t);
    }
  }
}

void SplitStepPropagator::advance(SystemState& state, double blowup_factor) {
  advance_steps(state, 1, blowup_factor);
}

void SplitStepPropagator::advance_steps(SystemState& state, std::size_t n_steps, double blowup_factor) {
  check_state(state);
  if (n_steps == 0) return;
  // The local step only rotates phases, so densities are unchanged across it
  // and the trailing half step of one step merges with the leading half step
  // of the next into a single full-dt local step.
  local_step(state, 0.5 * dt_);
  for (std::size_t k = 1; k <= n_steps; ++k) {
    kinetic_step(state);
    local_step(state, k < n_steps ? dt_ : 0.5 * dt_);
  }
  state.t += static_cast<double>(n_steps) * dt_;
  check_blowup(state, blowup_factor);
}

SystemState step(SystemState state, const StepSchedule& schedule, double dt) {
  SplitStepPropagator prop(state.grid, schedule, dt);
  prop.advance(state);
  return state;
}

std::vector<double> absorber_mask(const Grid& grid, const AbsorberConfig& absorber) {
  std::vector<double> mask(grid.size(), 1.0);
  if (!absorber.enabled) return mask;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double z = grid.z(j);
    const double d = std::min(z - grid.z_min(), grid.z_max() - z);
    if (d < absorber.width) {
      const double x = (absorber.width - d) / absorber.width;
      mask[j] = std::exp(-absorber.strength * x * x);
    }
  }
  return mask;
}

Trajectory evolve(SystemState state, const StepSchedule& schedule, const EvolutionConfig& config) {
  config.validate(state.grid);
  const std::size_t n = state.grid.size();
  const std::size_t nc = state.component_count();
  SplitStepPropagator prop(state.grid, schedule, config.dt);
  const auto mask = absorber_mask(state.grid, config.absorber);
  const std::size_t steps = config.step_count();

  Trajectory traj{state.grid, {}, std::vector<std::vector<double>>(nc), {},
                  std::vector<std::vector<double>>(nc), config.probe_z,
                  state.grid.nearest_index(config.probe_z), std::nullopt, state};
  const std::size_t n_snap = steps / config.record_stride + 1;
  const std::size_t n_line = steps / config.line_stride + 1;
  traj.times.reserve(n_snap);
  traj.line_times.reserve(n_line);
  for (std::size_t i = 0; i < nc; ++i) {
    traj.density_records[i].reserve(n_snap * n);
    traj.line_samples[i].reserve(n_line);
  }

  const double t0 = state.t;
  auto record_snapshot = [&](double t) {
    traj.times.push_back(t);
    for (std::size_t i = 0; i < nc; ++i) {
      auto& rec = traj.density_records[i];
      for (const auto& a : state.components[i].amplitudes) rec.push_back(std::norm(a));
    }
  };
  auto record_line = [&](double t) {
    traj.line_times.push_back(t);
    for (std::size_t i = 0; i < nc; ++i)
      traj.line_samples[i].push_back(std::norm(state.components[i].amplitudes[traj.probe_index]));
  };
  record_snapshot(t0);
  record_line(t0);

  // Without an absorber, whole stretches between recordings are advanced with
  // merged half steps; the absorber acts between steps, so it forces unit segments.
  const std::size_t segment = config.absorber.enabled ? 1 : std::gcd(config.line_stride, config.record_stride);
  for (std::size_t s = 0; s < steps;) {
    const std::size_t m = std::min(segment, steps - s);
    try {
      prop.advance_steps(state, m, config.blowup_factor);
    } catch (const BlowUpError& e) {
      if (!config.truncate_on_blowup) throw;
      traj.blowup_time = e.time();
      break;
    }
    s += m;
    if (config.absorber.enabled) {
      for (auto& c : state.components)
        for (std::size_t j = 0; j < n; ++j) c.amplitudes[j] *= mask[j];
    }
    // Recorded times come from the step counter so they do not accumulate
    // rounding from repeated addition.
    const double t = t0 + static_cast<double>(s) * config.dt;
    state.t = t;
    if (s % config.line_stride == 0) record_line(t);
    if (s % config.record_stride == 0) record_snapshot(t);
  }
  traj.final_state = std::move(state);
  return traj;
}

double energy(const SystemState& state, const StepSchedule& schedule) {
  const std::size_t nc = state.component_count();
  if (schedule.component_count() != nc) {
    throw ValidationError("schedule component count does not match the state");
  }
  const Grid& grid = state.grid;
  const std::size_t n = grid.size();
  const double dz = grid.dz();
  const auto k = grid.wavenumbers();
  SpectralTransform fft(n);

  std::vector<std::vector<double>> rho(nc, std::vector<double>(n));
  for (std::size_t i = 0; i < nc; ++i) density_into(state.components[i].amplitudes, rho[i]);

  double total = 0.0;
  for (std::size_t i = 0; i < nc; ++i) {
    auto buf = fft.buffer();
    std::copy(state.components[i].amplitudes.begin(), state.components[i].amplitudes.end(), buf.begin());
    fft.forward();
    const auto spec = fft.spectrum();
    // Parseval: sum_j |f'_j|^2 = (1/n) sum_k k^2 |F_k|^2.
    double kinetic = 0.0;
    for (std::size_t m = 0; m < n; ++m) kinetic += k[m] * k[m] * std::norm(spec[m]);
    total += kinetic * dz / static_cast<double>(n);

    double local = 0.0;
    const auto& g = schedule.self(i);
    const auto& th = schedule.phase(i);
    for (std::size_t j = 0; j < n; ++j) {
      const double z = grid.z(j);
      local += 0.5 * g.at(z) * rho[i][j] * rho[i][j] + th.at(z) * rho[i][j];
    }
    for (std::size_t p = i + 1; p < nc; ++p) {
      const auto& gc = schedule.cross(i, p);
      for (std::size_t j = 0; j < n; ++j) local += gc.at(grid.z(j)) * rho[i][j] * rho[p][j];
    }
    total += local * dz;
  }
  return total;
}

}  // namespace solitrain
