#include "solitrain/selftest.hpp"

#include <cmath>
#include <cstdio>

#include "solitrain/calculator.hpp"
#include "solitrain/error.hpp"
#include "solitrain/evolution.hpp"

namespace solitrain::cli {

namespace {

std::size_t steps_for(double t, double dt) { return static_cast<std::size_t>(std::llround(t / dt)); }

// Exposes blow-ups and bad parameters as failed checks, not exceptions.
template <typename F>
CheckResult guarded(const char* name, double limit, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return {name, false, std::nan(""), limit, e.what()};
  }
}

}  // namespace

CheckResult check_conservation(const SelftestOptions& opt) {
  constexpr double limit_norm = 1e-8;
  return guarded("conservation", limit_norm, [&] {
    const Grid grid = opt.grid.make();
    const auto sched = make_quench(2.2);
    auto state = init_uniform(grid, 1.0, 1);
    const double n_start = norm(state, 0);
    const double e_start = energy(state, sched);
    SplitStepPropagator prop(grid, sched, opt.dt);
    prop.advance_steps(state, steps_for(opt.horizon, opt.dt));
    const double norm_rate = std::abs(norm(state, 0) - n_start) / n_start / opt.horizon;
    const double e_drift = std::abs(energy(state, sched) - e_start) / std::abs(e_start);
    char buf[160];
    std::snprintf(buf, sizeof buf, "norm drift %.3g /time unit (limit 1e-8), energy drift %.3g (limit 1e-6)",
                  norm_rate, e_drift);
    return CheckResult{"conservation", norm_rate < limit_norm && e_drift < 1e-6, norm_rate, limit_norm, buf};
  });
}

CheckResult check_dark_soliton(const SelftestOptions& opt) {
  constexpr double limit = 1e-6;
  return guarded("dark-soliton", limit, [&] {
    const Grid grid = opt.grid.make();
    const double n0 = 1.0, g = 1.0;
    const double k = std::sqrt(g * n0 / 2.0);
    // One black soliton at z = 0 and its partner on the periodic seam.
    SystemState state{grid, {ComponentState{std::vector<Complex>(grid.size())}}, 0.0, n0};
    std::vector<double> rho0(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double z = grid.z(j);
      const double psi = std::sqrt(n0) * std::tanh(k * z) * std::tanh(k * (z - grid.z_min())) *
                         std::tanh(k * (grid.z_max() - z));
      state.components[0].amplitudes[j] = psi;
      rho0[j] = psi * psi;
    }
    StepSchedule sched(1);
    sched.set_self(0, constant_profile(g));
    SplitStepPropagator prop(grid, sched, opt.dt);
    prop.advance_steps(state, steps_for(opt.horizon, opt.dt));
    double worst = 0.0;
    const auto rho = density(state, 0);
    for (std::size_t j = 0; j < grid.size(); ++j) worst = std::max(worst, std::abs(rho[j] - rho0[j]));
    char buf[96];
    std::snprintf(buf, sizeof buf, "max density drift %.3g (limit 1e-6)", worst);
    return CheckResult{"dark-soliton", worst < limit, worst, limit, buf};
  });
}

CheckResult check_reduction(const SelftestOptions& opt) {
  constexpr double limit = 1e-8;
  return guarded("reduction", limit, [&] {
    StepSchedule sched(2);
    sched.set_self(0, {1.9, 1.0});
    sched.set_self(1, {1.9, 1.0});
    sched.set_cross(0, 1, {0.9, 0.0});
    const ComputationPlan plan{Operation::store, {}, sched, 2.8, Branch::r, std::nullopt};
    SimConfig config;
    config.grid = opt.grid;
    config.evolution.dt = opt.dt;
    config.evolution.t_final = opt.horizon;
    double dev = 0.0;
    const bool ok = verify_reduction(plan, config, limit, &dev);
    char buf[112];
    std::snprintf(buf, sizeof buf, "two-component vs reduced max deviation %.3g (limit 1e-8)", dev);
    return CheckResult{"reduction", ok, dev, limit, buf};
  });
}

CheckResult check_convergence(const SelftestOptions& opt) {
  constexpr double limit = 1e-5;
  return guarded("convergence", limit, [&] {
    const Grid grid = opt.grid.make();
    const auto sched = make_quench(2.2);
    const double horizon = 5.0;
    const std::size_t n_coarse = steps_for(horizon, opt.dt);
    if (n_coarse == 0) throw ValidationError("dt exceeds the convergence horizon");
    auto coarse = init_uniform(grid, 1.0, 1);
    auto fine = coarse;
    SplitStepPropagator pc(grid, sched, opt.dt), pf(grid, sched, opt.dt / 2.0);
    const std::size_t checkpoints = 5;
    double worst = 0.0;
    for (std::size_t c = 1; c <= checkpoints; ++c) {
      const std::size_t target = n_coarse * c / checkpoints;
      const std::size_t prev = n_coarse * (c - 1) / checkpoints;
      pc.advance_steps(coarse, target - prev);
      pf.advance_steps(fine, 2 * (target - prev));
      const auto a = density(coarse, 0), b = density(fine, 0);
      for (std::size_t j = 0; j < a.size(); ++j) worst = std::max(worst, std::abs(a[j] - b[j]));
    }
    char buf[112];
    std::snprintf(buf, sizeof buf, "max density change on halving dt %.3g (limit 1e-5)", worst);
    return CheckResult{"convergence", worst < limit, worst, limit, buf};
  });
}

bool norm_nonincreasing(const std::vector<double>& norms, std::size_t* first_violation) {
  for (std::size_t k = 1; k < norms.size(); ++k) {
    if (!(norms[k] <= norms[k - 1] * (1.0 + 1e-13))) {
      if (first_violation) *first_violation = k;
      return false;
    }
  }
  return true;
}

CheckResult check_absorber(const SelftestOptions& opt) {
  return guarded("absorber", 0.0, [&] {
    const Grid grid = opt.grid.make();
    const auto sched = make_quench(3.0);
    EvolutionConfig evo;
    evo.dt = opt.dt;
    evo.t_final = opt.horizon;
    evo.absorber.enabled = true;
    evo.record_stride = std::max<std::size_t>(1, steps_for(opt.horizon / 50.0, opt.dt));
    const auto traj = evolve(init_uniform(grid, 1.0, 1), sched, evo);
    std::vector<double> norms;
    for (std::size_t k = 0; k < traj.snapshot_count(); ++k) {
      double sum = 0.0;
      for (double v : traj.snapshot(0, k)) sum += v;
      norms.push_back(sum * grid.dz());
    }
    std::size_t bad = 0;
    const bool ok = norm_nonincreasing(norms, &bad);
    const std::string detail = ok ? "norm nonincreasing over " + std::to_string(norms.size()) + " records"
                                  : "norm increased at record " + std::to_string(bad);
    return CheckResult{"absorber", ok, ok ? 0.0 : norms[bad] - norms[bad - 1], 0.0, detail};
  });
}

bool run_selftest(const SelftestOptions& opt, std::ostream& os) {
  bool all = true;
  for (auto check : {check_conservation, check_dark_soliton, check_reduction, check_convergence, check_absorber}) {
    const auto r = check(opt);
    os << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n' << std::flush;
    all = all && r.passed;
  }
  return all;
}

}  // namespace solitrain::cli
