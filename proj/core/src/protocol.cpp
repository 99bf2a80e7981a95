#include "solitrain/protocol.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

#include "solitrain/error.hpp"

namespace solitrain {

const char* to_string(Branch b) noexcept { return b == Branch::r ? "r" : "ra"; }

Branch branch_from_string(const char* text) {
  if (std::strcmp(text, "r") == 0) return Branch::r;
  if (std::strcmp(text, "ra") == 0) return Branch::ra;
  throw ValidationError(std::string("unknown branch '") + text + "' (expected r or ra)");
}

void CritConstants::validate() const {
  if (!(c_up > 1.0 && 1.0 > c_down && c_down > 0.0)) {
    std::ostringstream msg;
    msg << "critical constants must satisfy c_up > 1 > c_down > 0 (got c_up=" << c_up
        << ", c_down=" << c_down << ")";
    throw ValidationError(msg.str());
  }
}

StepSchedule::StepSchedule(std::size_t n_components)
    : n_(n_components),
      self_(n_components),
      cross_(n_components * n_components),
      phase_(n_components) {
  if (n_components < 1) throw ValidationError("schedule needs at least one component");
}

void StepSchedule::set_self(std::size_t i, StepProfile p) { self_.at(i) = p; }

void StepSchedule::set_cross(std::size_t i, std::size_t j, StepProfile p) {
  if (i >= n_ || j >= n_) throw ValidationError("cross index out of range");
  if (i == j) throw ValidationError("cross interaction diagonal must stay zero");
  cross_[i * n_ + j] = p;
  cross_[j * n_ + i] = p;
}

void StepSchedule::set_phase(std::size_t i, StepProfile p) { phase_.at(i) = p; }

bool StepSchedule::has_cross() const noexcept {
  for (const auto& p : cross_)
    if (p.left != 0.0 || p.right != 0.0) return true;
  return false;
}

void StepSchedule::validate(bool require_positive_right) const {
  auto finite = [](const StepProfile& p) { return std::isfinite(p.left) && std::isfinite(p.right); };
  for (std::size_t i = 0; i < n_; ++i) {
    if (!finite(self_[i]) || !finite(phase_[i])) {
      throw ValidationError("schedule values must be finite (component " + std::to_string(i) + ")");
    }
    if (require_positive_right && !(self_[i].right > 0.0)) {
      throw ValidationError("right-side self interaction must be positive (component " +
                            std::to_string(i) + ")");
    }
    for (std::size_t j = 0; j < n_; ++j) {
      const auto& p = cross_[i * n_ + j];
      if (!finite(p)) throw ValidationError("cross interaction values must be finite");
      if (i == j && (p.left != 0.0 || p.right != 0.0)) {
        throw ValidationError("cross interaction diagonal must be zero");
      }
      if (!(p == cross_[j * n_ + i])) throw ValidationError("cross interactions must be symmetric");
    }
  }
}

namespace {
struct SideSums {
  double left = 0.0;
  double right = 0.0;
};

SideSums effective_sides(const StepSchedule& s, std::size_t i) {
  SideSums sums{s.self(i).left, s.self(i).right};
  for (std::size_t j = 0; j < s.component_count(); ++j) {
    if (j == i) continue;
    sums.left += s.cross(i, j).left;
    sums.right += s.cross(i, j).right;
  }
  return sums;
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(name) + " must be positive");
}
void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError(std::string(name) + " must be >= 0");
}
}  // namespace

EffectiveRatio effective_ratio(const StepSchedule& schedule, std::size_t i) {
  if (i >= schedule.component_count()) throw ValidationError("component index out of range");
  const auto sums = effective_sides(schedule, i);
  if (!(sums.right > 0.0)) {
    throw ValidationError("invalid schedule: right-side effective interaction must be positive");
  }
  return {sums.left / sums.right, sums.left < 0.0 ? Branch::ra : Branch::r};
}

StepSchedule make_quench(double s, double gR) {
  require_positive(gR, "gR");
  if (!std::isfinite(s)) throw ValidationError("quench ratio must be finite");
  StepSchedule sched(1);
  sched.set_self(0, {s * gR, gR});
  return sched;
}

StepSchedule make_phase_quench(double s, double theta_left, double theta_right, double gR) {
  auto sched = make_quench(s, gR);
  if (!std::isfinite(theta_left) || !std::isfinite(theta_right)) {
    throw ValidationError("phase values must be finite");
  }
  sched.set_phase(0, {theta_left, theta_right});
  return sched;
}

StepSchedule plan_add(double a, double b, double gR, const CritConstants& crit) {
  require_nonnegative(a, "addend a");
  require_nonnegative(b, "addend b");
  require_positive(gR, "gR");
  crit.validate();
  StepSchedule sched(2);
  for (std::size_t i = 0; i < 2; ++i) sched.set_self(i, {a, gR});
  sched.set_cross(0, 1, {b + crit.c_up * gR, 0.0});
  return sched;
}

StepSchedule plan_mul(double m, std::size_t n_factor, double gR, const CritConstants& crit) {
  require_nonnegative(m, "factor M");
  require_positive(gR, "gR");
  if (n_factor < 1) throw ValidationError("factor N must be a positive integer");
  crit.validate();
  StepSchedule sched(n_factor);
  // Each component carries g_ij^L = M to its N-1 partners; its own left
  // value holds the remaining M plus the threshold offset.
  for (std::size_t i = 0; i < n_factor; ++i) sched.set_self(i, {m + crit.c_up * gR, gR});
  for (std::size_t i = 0; i < n_factor; ++i)
    for (std::size_t j = i + 1; j < n_factor; ++j) sched.set_cross(i, j, {m, 0.0});
  return sched;
}

StepSchedule plan_sum3(double a, double b, double c, double gR, const CritConstants& crit) {
  require_nonnegative(a, "addend a");
  require_nonnegative(b, "addend b");
  require_nonnegative(c, "addend c");
  require_positive(gR, "gR");
  crit.validate();
  // Left-side coupling matrix with the cyclic assignment
  //   (1,1) (2,3) (3,2) -> a,  (1,2) (2,1) (3,3) -> b,  (1,3) (3,1) (2,2) -> c.
  // Diagonal entries fold into the self values; off-diagonal pairs are
  // symmetrized by averaging, which preserves every row sum.
  const double m[3][3] = {{a, b, c}, {b, c, a}, {c, a, b}};
  StepSchedule sched(3);
  for (std::size_t i = 0; i < 3; ++i) sched.set_self(i, {m[i][i] + crit.c_up * gR, gR});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j) sched.set_cross(i, j, {0.5 * (m[i][j] + m[j][i]), 0.0});
  return sched;
}

ScaleParameters canonical_scale(double factor) {
  require_positive(factor, "scale factor");
  if (factor >= 1.0) return {factor - 1.0, 0.0};
  return {0.0, 1.0 / factor - 1.0};
}

StepSchedule plan_scale(double gL, double c, double d, double gR, const CritConstants& crit) {
  require_nonnegative(gL, "scaled value gL");
  require_nonnegative(c, "scale parameter c");
  require_nonnegative(d, "scale parameter d");
  require_positive(gR, "gR");
  crit.validate();
  // The threshold term is carried as (1 + d) * c_up * gR so that it survives
  // division by the raised right side: s_eff = (1+c)/(1+d) * gL/gR + c_up.
  StepSchedule sched(2);
  for (std::size_t i = 0; i < 2; ++i) sched.set_self(i, {gL, gR});
  sched.set_cross(0, 1, {c * gL + (1.0 + d) * crit.c_up * gR, d * gR});
  return sched;
}

StepSchedule plan_invert(double k, InvertRange range, double gR, const CritConstants& crit) {
  if (!(range.k1 > 0.0 && range.k1 < range.k2)) {
    throw ValidationError("inversion range must satisfy 0 < k1 < k2");
  }
  if (!(k >= range.k1 && k <= range.k2)) {
    std::ostringstream msg;
    msg << "k=" << k << " outside the declared inversion range [" << range.k1 << ", " << range.k2 << "]";
    throw ValidationError(msg.str());
  }
  require_positive(gR, "gR");
  crit.validate();
  StepSchedule sched(2);
  for (std::size_t i = 0; i < 2; ++i) sched.set_self(i, {1.0 / k, gR});
  sched.set_cross(0, 1, {crit.c_up * gR, 0.0});
  return sched;
}

StepSchedule plan_signed_mul(double m, std::size_t n_factor, double gR, const CritConstants& crit) {
  require_nonnegative(m, "factor M");
  require_positive(gR, "gR");
  if (n_factor < 1) throw ValidationError("factor N must be a positive integer");
  crit.validate();
  StepSchedule sched(n_factor);
  for (std::size_t i = 0; i < n_factor; ++i) sched.set_self(i, {-m + crit.c_down * gR, gR});
  for (std::size_t i = 0; i < n_factor; ++i)
    for (std::size_t j = i + 1; j < n_factor; ++j) sched.set_cross(i, j, {-m, 0.0});
  return sched;
}

bool components_equivalent(const StepSchedule& schedule, double tol) {
  const auto ref = effective_sides(schedule, 0);
  const auto& ref_phase = schedule.phase(0);
  for (std::size_t i = 1; i < schedule.component_count(); ++i) {
    const auto s = effective_sides(schedule, i);
    if (std::abs(s.left - ref.left) > tol || std::abs(s.right - ref.right) > tol) return false;
    if (!(schedule.phase(i) == ref_phase)) return false;
  }
  return true;
}

StepSchedule reduced_schedule(const StepSchedule& schedule) {
  if (!components_equivalent(schedule, 1e-12)) {
    throw ValidationError("components are not equivalent; cannot reduce to a single equation");
  }
  const auto sums = effective_sides(schedule, 0);
  StepSchedule single(1);
  single.set_self(0, {sums.left, sums.right});
  single.set_phase(0, schedule.phase(0));
  return single;
}

}  // namespace solitrain
