#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "solitrain/simulation.hpp"

namespace solitrain::testing {

// Same resolution as the default grid, a quarter of the width; for tests of
// mechanics where the full run would only cost time.
inline SimConfig small_config(double t_final = 25.0) {
  SimConfig c;
  c.grid = {1024, 100.0, -50.0};
  c.evolution.t_final = t_final;
  c.detector.background_window = 10.0;
  return c;
}

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  bool coin() { return integer(0, 1) == 1; }
};

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace solitrain::testing
