#include "solitrain/field.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "solitrain/error.hpp"

namespace solitrain {

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

Grid::Grid(std::size_t n_points, double length, double z_min)
    : n_points_(n_points), length_(length), z_min_(z_min) {}

std::vector<double> Grid::coordinates() const {
  std::vector<double> z(n_points_);
  for (std::size_t j = 0; j < n_points_; ++j) z[j] = this->z(j);
  return z;
}

std::size_t Grid::nearest_index(double zq) const {
  if (!(zq >= z_min_ && zq < z_max())) {
    std::ostringstream msg;
    msg << "position z=" << zq << " lies outside the grid [" << z_min_ << ", " << z_max() << ")";
    throw ValidationError(msg.str());
  }
  auto j = static_cast<std::size_t>(std::floor((zq - z_min_) / dz()));
  return std::min(j, n_points_ - 1);
}

std::vector<double> Grid::wavenumbers() const {
  std::vector<double> k(n_points_);
  const double dk = 2.0 * std::numbers::pi / length_;
  const auto n = static_cast<std::ptrdiff_t>(n_points_);
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    const std::ptrdiff_t m = (j <= n / 2 - 1) ? j : j - n;
    k[static_cast<std::size_t>(j)] = dk * static_cast<double>(m);
  }
  return k;
}

Grid make_grid(std::size_t n_points, double length, double z_min) {
  if (!is_power_of_two(n_points) || n_points < 256) {
    std::ostringstream msg;
    msg << "grid n_points=" << n_points << " must be a power of two >= 256";
    throw ValidationError(msg.str());
  }
  if (!(length > 0.0) || !std::isfinite(length) || !std::isfinite(z_min)) {
    throw ValidationError("grid length L must be positive and finite");
  }
  if (!(z_min < 0.0 && z_min + length > 0.0)) {
    throw ValidationError("grid must contain z = 0 in its interior (z_min < 0 < z_min + L)");
  }
  Grid grid(n_points, length, z_min);
  // The step boundary must sit on a cell face, i.e. -z_min / dz is an integer.
  const double faces = -z_min / grid.dz();
  if (std::abs(faces - std::round(faces)) > 1e-9 * std::max(1.0, faces)) {
    throw ValidationError("z = 0 must fall midway between two samples (-z_min must be a multiple of dz)");
  }
  return grid;
}

SystemState init_uniform(const Grid& grid, double n0, std::size_t n_components) {
  if (!(n0 > 0.0) || !std::isfinite(n0)) throw ValidationError("n0 must be positive");
  if (n_components < 1) throw ValidationError("component count must be >= 1");
  SystemState state{grid, {}, 0.0, n0};
  const Complex amp(std::sqrt(n0), 0.0);
  state.components.assign(n_components, ComponentState{std::vector<Complex>(grid.size(), amp)});
  return state;
}

namespace {
const ComponentState& component_at(const SystemState& state, std::size_t i) {
  if (i >= state.components.size()) {
    std::ostringstream msg;
    msg << "component index " << i << " out of range (N=" << state.components.size() << ")";
    throw ValidationError(msg.str());
  }
  return state.components[i];
}
}  // namespace

void density_into(std::span<const Complex> psi, std::span<double> out) {
  for (std::size_t j = 0; j < psi.size(); ++j) out[j] = std::norm(psi[j]);
}

std::vector<double> density(const SystemState& state, std::size_t i) {
  const auto& c = component_at(state, i);
  std::vector<double> rho(c.amplitudes.size());
  density_into(c.amplitudes, rho);
  return rho;
}

double norm(const SystemState& state, std::size_t i) {
  const auto& c = component_at(state, i);
  double sum = 0.0;
  for (const auto& a : c.amplitudes) sum += std::norm(a);
  return sum * state.grid.dz();
}

}  // namespace solitrain
