#pragma once

#include <cstddef>
#include <vector>

namespace solitrain {

// Piecewise-constant profile: `left` for z <= 0, `right` for z > 0.
struct StepProfile {
  double left = 0.0;
  double right = 0.0;

  double at(double z) const noexcept { return z > 0.0 ? right : left; }
  bool operator==(const StepProfile&) const = default;
};

inline StepProfile constant_profile(double v) { return {v, v}; }

enum class Branch { r, ra };

const char* to_string(Branch b) noexcept;
Branch branch_from_string(const char* text);

// Emission thresholds for increased (c_up) and decreased (c_down) interactions.
struct CritConstants {
  double c_up = 2.2;
  double c_down = 1.0 / 2.2;

  void validate() const;
  bool operator==(const CritConstants&) const = default;
};

// Self interactions g_i(z), symmetric cross interactions g_ij(z) with zero
// diagonal, and imprinted phase rates theta_i(z) for N components.
class StepSchedule {
 public:
  explicit StepSchedule(std::size_t n_components);

  std::size_t component_count() const noexcept { return self_.size(); }

  const StepProfile& self(std::size_t i) const { return self_.at(i); }
  const StepProfile& cross(std::size_t i, std::size_t j) const { return cross_.at(i * n_ + j); }
  const StepProfile& phase(std::size_t i) const { return phase_.at(i); }

  void set_self(std::size_t i, StepProfile p);
  // Sets both (i, j) and (j, i). Throws ValidationError for i == j.
  void set_cross(std::size_t i, std::size_t j, StepProfile p);
  void set_phase(std::size_t i, StepProfile p);

  bool has_cross() const noexcept;

  // Symmetry, zero diagonal, finite values. With `require_positive_right`,
  // every right-side self value must also be > 0.
  void validate(bool require_positive_right = false) const;

  bool operator==(const StepSchedule&) const = default;

 private:
  std::size_t n_;
  std::vector<StepProfile> self_;
  std::vector<StepProfile> cross_;
  std::vector<StepProfile> phase_;
};

struct EffectiveRatio {
  double value = 1.0;
  Branch branch = Branch::r;
};

// (g_i^L + sum_j g_ij^L) / (g_i^R + sum_j g_ij^R); branch ra when the
// numerator is negative. Non-positive denominator -> ValidationError.
EffectiveRatio effective_ratio(const StepSchedule& schedule, std::size_t component);

// Single-component interaction quench g^L = s * gR, g^R = gR.
StepSchedule make_quench(double s, double gR = 1.0);
// Single-component quench plus a step phase rate theta(z).
StepSchedule make_phase_quench(double s, double theta_left, double theta_right, double gR = 1.0);

// --- Arithmetic plans ---------------------------------------------------
// Each plan shifts the left-side numerator by c_up * gR (or c_down * gR on the
// attractive branch) so that a zero result sits exactly at the threshold.

StepSchedule plan_add(double a, double b, double gR = 1.0, const CritConstants& crit = {});
StepSchedule plan_mul(double m, std::size_t n_factor, double gR = 1.0, const CritConstants& crit = {});
StepSchedule plan_sum3(double a, double b, double c, double gR = 1.0, const CritConstants& crit = {});

// Scaling of x = gL / gR by the factor (1 + c) / (1 + d).
struct ScaleParameters {
  double c = 0.0;
  double d = 0.0;
  double factor() const noexcept { return (1.0 + c) / (1.0 + d); }
};
// Chooses d = 0 for factors >= 1 and c = 0 otherwise.
ScaleParameters canonical_scale(double factor);
StepSchedule plan_scale(double gL, double c, double d, double gR = 1.0, const CritConstants& crit = {});

struct InvertRange {
  double k1 = 0.0;
  double k2 = 0.0;
};
StepSchedule plan_invert(double k, InvertRange range, double gR = 1.0, const CritConstants& crit = {});

StepSchedule plan_signed_mul(double m, std::size_t n_factor, double gR = 1.0,
                             const CritConstants& crit = {});

// True when every component sees the same effective left/right interaction
// and phase, so identical initial components stay identical.
bool components_equivalent(const StepSchedule& schedule, double tol = 0.0);

// Single-component schedule with g = g_i + sum_j g_ij on each side.
// Requires components_equivalent().
StepSchedule reduced_schedule(const StepSchedule& schedule);

}  // namespace solitrain
