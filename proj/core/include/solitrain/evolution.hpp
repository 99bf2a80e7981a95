#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "solitrain/field.hpp"
#include "solitrain/protocol.hpp"
#include "solitrain/spectral.hpp"

namespace solitrain {

// Multiplicative sponge at both periodic edges: the mask ramps from 1 in the
// interior to exp(-strength) at the edge over `width`.
struct AbsorberConfig {
  bool enabled = false;
  double width = 20.0;
  double strength = 5.0;
};

struct EvolutionConfig {
  // 5e-4 keeps the dt-halving change of every density sample below 1e-5,
  // including the cells next to the interaction step.
  double dt = 5e-4;
  double t_final = 50.0;
  // Steps between full density snapshots (0.1 time units at the default dt).
  std::size_t record_stride = 200;
  // Steps between samples of the density at probe_z (0.01 time units).
  std::size_t line_stride = 20;
  double probe_z = 10.0;
  AbsorberConfig absorber;
  // Stop and return the partial trajectory on blow-up instead of throwing.
  bool truncate_on_blowup = false;
  // Blow-up when |psi| exceeds this multiple of sqrt(n0).
  double blowup_factor = 100.0;

  std::size_t step_count() const;
  double line_dt() const { return dt * static_cast<double>(line_stride); }
  void validate(const Grid& grid) const;
};

// Density history of an evolve() call. Snapshots are stored row-major per
// component: snapshot k of component i is density_records[i][k*n .. (k+1)*n).
struct Trajectory {
  Grid grid;
  std::vector<double> times;
  std::vector<std::vector<double>> density_records;
  std::vector<double> line_times;
  std::vector<std::vector<double>> line_samples;
  double probe_z = 0.0;
  std::size_t probe_index = 0;
  std::optional<double> blowup_time;
  SystemState final_state;

  std::size_t component_count() const noexcept { return density_records.size(); }
  std::size_t snapshot_count() const noexcept { return times.size(); }
  std::span<const double> snapshot(std::size_t component, std::size_t k) const;
  // Snapshot index whose time is nearest to t.
  std::size_t nearest_snapshot(double t) const;
};

// Strang split-step integrator for
//   i d_t psi_i = -d_z^2 psi_i + (g_i |psi_i|^2 + sum_j g_ij |psi_j|^2 + theta_i) psi_i
// with periodic boundaries. Precomputes the schedule on the grid and the
// kinetic multiplier for a fixed dt.
class SplitStepPropagator {
 public:
  SplitStepPropagator(const Grid& grid, const StepSchedule& schedule, double dt);

  // One step: local half step, kinetic step exp(-i k^2 dt), local half step.
  // Throws BlowUpError on non-finite or runaway amplitude.
  void advance(SystemState& state, double blowup_factor = 100.0);
  // n_steps consecutive steps; blow-up is checked once at the end.
  void advance_steps(SystemState& state, std::size_t n_steps, double blowup_factor = 100.0);

  double dt() const noexcept { return dt_; }

 private:
  void local_step(SystemState& state, double tau);
  void kinetic_step(SystemState& state);
  void check_state(const SystemState& state) const;
  void check_blowup(const SystemState& state, double blowup_factor) const;

  Grid grid_;
  std::size_t n_components_;
  double dt_;
  std::vector<std::vector<double>> self_;
  std::vector<std::vector<double>> phase_;
  struct CrossTerm {
    std::size_t partner;
    std::vector<double> values;
  };
  std::vector<std::vector<CrossTerm>> cross_;
  std::vector<Complex> kinetic_;
  std::vector<std::vector<double>> rho_;
  std::vector<double> local_;
  SpectralTransform fft_;
};

// Convenience single step; builds a propagator per call.
SystemState step(SystemState state, const StepSchedule& schedule, double dt);

Trajectory evolve(SystemState state, const StepSchedule& schedule, const EvolutionConfig& config);

// Sum_i int |d_z psi_i|^2 + (g_i/2)|psi_i|^4 + theta_i |psi_i|^2 dz
//   + sum_{i<j} int g_ij |psi_i|^2 |psi_j|^2 dz, derivative taken spectrally.
double energy(const SystemState& state, const StepSchedule& schedule);

std::vector<double> absorber_mask(const Grid& grid, const AbsorberConfig& absorber);

}  // namespace solitrain
