#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace solitrain {

using Complex = std::complex<double>;

// Uniform periodic 1D grid. Samples are cell-centred,
//   z_j = z_min + (j + 1/2) dz,  j = 0 .. n_points-1,
// so z = 0 (and the periodic seam at z_min) falls midway between two samples
// whenever -z_min is a multiple of dz.
class Grid {
 public:
  Grid(std::size_t n_points, double length, double z_min);

  std::size_t size() const noexcept { return n_points_; }
  double length() const noexcept { return length_; }
  double z_min() const noexcept { return z_min_; }
  double z_max() const noexcept { return z_min_ + length_; }
  double dz() const noexcept { return length_ / static_cast<double>(n_points_); }

  double z(std::size_t j) const noexcept {
    return z_min_ + (static_cast<double>(j) + 0.5) * dz();
  }
  std::vector<double> coordinates() const;
  // Index of the sample nearest to z. Throws ValidationError outside the grid.
  std::size_t nearest_index(double z) const;
  // Angular wavenumbers in FFT order.
  std::vector<double> wavenumbers() const;

  bool operator==(const Grid&) const = default;

 private:
  std::size_t n_points_;
  double length_;
  double z_min_;
};

// Validated grid factory: n_points a power of two >= 256, L > 0 and
// z_min < 0 < z_min + L with z = 0 between two samples.
Grid make_grid(std::size_t n_points, double length, double z_min);

struct ComponentState {
  std::vector<Complex> amplitudes;
};

struct SystemState {
  Grid grid;
  std::vector<ComponentState> components;
  double t = 0.0;
  // Background density used to scale the blow-up threshold.
  double n0 = 1.0;

  std::size_t component_count() const noexcept { return components.size(); }
};

SystemState init_uniform(const Grid& grid, double n0, std::size_t n_components);

std::vector<double> density(const SystemState& state, std::size_t component);
void density_into(std::span<const Complex> psi, std::span<double> out);

// Sum |psi|^2 dz.
double norm(const SystemState& state, std::size_t component);

bool is_power_of_two(std::size_t n) noexcept;

}  // namespace solitrain
