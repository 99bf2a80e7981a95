#include "solitrain/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "solitrain/error.hpp"

namespace solitrain::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidationError("config: " + path + ": " + what);
}

void reject_unknown(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) fail(path.empty() ? key : path + "." + key, "unknown key");
  }
}

double get_number(const json& obj, const std::string& key, const std::string& path, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

std::size_t get_count(const json& obj, const std::string& key, const std::string& path, std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) fail(path + "." + key, "expected a non-negative integer");
  return v.get<std::size_t>();
}

bool get_bool(const json& obj, const std::string& key, const std::string& path, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_boolean()) fail(path + "." + key, "expected true or false");
  return v.get<bool>();
}

StepProfile profile_from_json(const json& j, const std::string& path) {
  reject_unknown(j, path, {"left", "right"});
  if (!j.contains("left") || !j.contains("right")) fail(path, "needs both 'left' and 'right'");
  return {get_number(j, "left", path, 0.0), get_number(j, "right", path, 0.0)};
}

json profile_to_json(const StepProfile& p) { return json{{"left", p.left}, {"right", p.right}}; }

// Wraps a validation failure from a module precondition with the key path.
template <typename F>
void checked(const std::string& path, F&& f) {
  try {
    f();
  } catch (const ValidationError& e) {
    fail(path, e.what());
  }
}

}  // namespace

StepSchedule schedule_from_json(const json& j, const std::string& path) {
  reject_unknown(j, path, {"N", "self", "cross", "phase"});
  if (!j.contains("N")) fail(path + ".N", "missing component count");
  const std::size_t n = get_count(j, "N", path, 1);
  if (n < 1) fail(path + ".N", "must be >= 1");
  StepSchedule sched(n);

  auto per_component = [&](const char* key, auto setter) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    const std::string p = path + "." + key;
    if (v.is_object()) {
      const auto prof = profile_from_json(v, p);
      for (std::size_t i = 0; i < n; ++i) setter(i, prof);
      return;
    }
    if (!v.is_array() || (v.size() != n && v.size() != 1)) fail(p, "expected one profile or a list of N profiles");
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t src = v.size() == 1 ? 0 : i;
      setter(i, profile_from_json(v.at(src), p + "[" + std::to_string(src) + "]"));
    }
  };
  bool have_self = false;
  if (j.contains("self")) have_self = true;
  if (!have_self) fail(path + ".self", "missing self-interaction profiles");
  per_component("self", [&](std::size_t i, StepProfile p) { sched.set_self(i, p); });
  per_component("phase", [&](std::size_t i, StepProfile p) { sched.set_phase(i, p); });

  if (j.contains("cross")) {
    const auto& v = j.at("cross");
    const std::string p = path + ".cross";
    if (!v.is_array()) fail(p, "expected a list of {i, j, left, right}");
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const std::string pk = p + "[" + std::to_string(k) + "]";
      const auto& e = v.at(k);
      reject_unknown(e, pk, {"i", "j", "left", "right"});
      if (!e.contains("i") || !e.contains("j")) fail(pk, "needs component indices 'i' and 'j'");
      const auto a = get_count(e, "i", pk, 0);
      const auto b = get_count(e, "j", pk, 0);
      if (a >= n || b >= n) fail(pk, "component index out of range for N=" + std::to_string(n));
      if (a == b) fail(pk, "cross interaction needs i != j");
      if (!seen.insert({std::min(a, b), std::max(a, b)}).second) fail(pk, "duplicate pair");
      json prof = e;
      prof.erase("i");
      prof.erase("j");
      sched.set_cross(a, b, profile_from_json(prof, pk));
    }
  }
  checked(path, [&] { sched.validate(); });
  return sched;
}

json schedule_to_json(const StepSchedule& s) {
  const std::size_t n = s.component_count();
  json self = json::array(), phase = json::array(), cross = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    self.push_back(profile_to_json(s.self(i)));
    phase.push_back(profile_to_json(s.phase(i)));
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& p = s.cross(i, j);
      if (p.left != 0.0 || p.right != 0.0) cross.push_back({{"i", i}, {"j", j}, {"left", p.left}, {"right", p.right}});
    }
  }
  return json{{"N", n}, {"self", self}, {"cross", cross}, {"phase", phase}};
}

json sim_config_to_json(const SimConfig& c) {
  const auto win = c.detector.resolved_window(c.evolution.t_final);
  return json{
      {"grid", {{"n_points", c.grid.n_points}, {"L", c.grid.length}, {"z_min", c.grid.z_min}}},
      {"initial", {{"n0", c.n0}}},
      {"evolution",
       {{"dt", c.evolution.dt},
        {"t_final", c.evolution.t_final},
        {"record_stride", c.evolution.record_stride},
        {"line_stride", c.evolution.line_stride},
        {"blowup_factor", c.evolution.blowup_factor},
        {"absorber",
         {{"enabled", c.evolution.absorber.enabled},
          {"width", c.evolution.absorber.width},
          {"strength", c.evolution.absorber.strength}}}}},
      {"detector",
       {{"z_d", c.detector.z_d},
        {"depth_fraction", c.detector.depth_fraction},
        {"background_window", c.detector.background_window},
        {"min_separation", c.detector.min_separation},
        {"window", {win.t_start, win.t_end}}}},
      {"crit", {{"c_up", c.crit.c_up}, {"c_down", c.crit.c_down}}},
  };
}

RunConfig parse_run_config(const std::string& text, const SimConfig& base) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: malformed JSON: ") + e.what());
  }
  reject_unknown(doc, "", {"grid", "initial", "evolution", "detector", "schedule", "crit"});
  RunConfig rc{base, std::nullopt};
  SimConfig& c = rc.sim;

  if (doc.contains("grid")) {
    const auto& g = doc["grid"];
    reject_unknown(g, "grid", {"n_points", "L", "z_min"});
    c.grid.n_points = get_count(g, "n_points", "grid", c.grid.n_points);
    c.grid.length = get_number(g, "L", "grid", c.grid.length);
    c.grid.z_min = get_number(g, "z_min", "grid", c.grid.z_min);
  }
  checked("grid", [&] { c.grid.make(); });

  if (doc.contains("initial")) {
    const auto& i = doc["initial"];
    reject_unknown(i, "initial", {"n0"});
    c.n0 = get_number(i, "n0", "initial", c.n0);
    if (!(c.n0 > 0.0)) fail("initial.n0", "must be positive");
  }

  bool explicit_window = false;
  if (doc.contains("evolution")) {
    const auto& e = doc["evolution"];
    reject_unknown(e, "evolution", {"dt", "t_final", "record_stride", "line_stride", "blowup_factor", "absorber"});
    auto& ev = c.evolution;
    ev.dt = get_number(e, "dt", "evolution", ev.dt);
    ev.t_final = get_number(e, "t_final", "evolution", ev.t_final);
    ev.record_stride = get_count(e, "record_stride", "evolution", ev.record_stride);
    ev.line_stride = get_count(e, "line_stride", "evolution", ev.line_stride);
    ev.blowup_factor = get_number(e, "blowup_factor", "evolution", ev.blowup_factor);
    if (e.contains("absorber")) {
      const auto& a = e["absorber"];
      reject_unknown(a, "evolution.absorber", {"enabled", "width", "strength"});
      ev.absorber.enabled = get_bool(a, "enabled", "evolution.absorber", ev.absorber.enabled);
      ev.absorber.width = get_number(a, "width", "evolution.absorber", ev.absorber.width);
      ev.absorber.strength = get_number(a, "strength", "evolution.absorber", ev.absorber.strength);
    }
    if (!(ev.dt > 0.0 && ev.dt <= 1e-2)) fail("evolution.dt", "must satisfy 0 < dt <= 1e-2");
    if (!(ev.t_final > 0.0)) fail("evolution.t_final", "must be positive");
    if (ev.record_stride < 1) fail("evolution.record_stride", "must be >= 1");
    if (ev.line_stride < 1) fail("evolution.line_stride", "must be >= 1");
    if (ev.absorber.enabled && !(ev.absorber.width > 0.0 && ev.absorber.width < c.grid.length / 4.0)) {
      fail("evolution.absorber.width", "must satisfy 0 < width < L/4");
    }
    if (!(ev.absorber.strength >= 0.0)) fail("evolution.absorber.strength", "must be >= 0");
  }

  if (doc.contains("detector")) {
    const auto& d = doc["detector"];
    reject_unknown(d, "detector", {"z_d", "depth_fraction", "background_window", "min_separation", "window"});
    auto& det = c.detector;
    det.z_d = get_number(d, "z_d", "detector", det.z_d);
    det.depth_fraction = get_number(d, "depth_fraction", "detector", det.depth_fraction);
    det.background_window = get_number(d, "background_window", "detector", det.background_window);
    det.min_separation = get_number(d, "min_separation", "detector", det.min_separation);
    if (d.contains("window")) {
      const auto& w = d["window"];
      if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number()) {
        fail("detector.window", "expected [t_start, t_end]");
      }
      det.window = MeasureWindow{w[0].get<double>(), w[1].get<double>()};
      explicit_window = true;
    }
    if (!(det.depth_fraction > 0.0 && det.depth_fraction < 1.0)) fail("detector.depth_fraction", "must lie in (0, 1)");
    if (!(det.min_separation > 0.0)) fail("detector.min_separation", "must be positive");
    if (!(det.background_window > 0.0)) fail("detector.background_window", "must be positive");
    if (det.z_d == 0.0) fail("detector.z_d", "must lie off the step at z = 0");
  }
  // A base window tied to a different horizon would be stale.
  if (!explicit_window && doc.contains("evolution") && doc["evolution"].contains("t_final")) c.detector.window.reset();
  if (const auto w = c.detector.resolved_window(c.evolution.t_final);
      !(w.t_start < w.t_end && w.t_end <= c.evolution.t_final)) {
    fail("detector.window", "must satisfy t_start < t_end <= t_final");
  }

  if (doc.contains("crit")) {
    const auto& k = doc["crit"];
    reject_unknown(k, "crit", {"c_up", "c_down"});
    c.crit.c_up = get_number(k, "c_up", "crit", c.crit.c_up);
    c.crit.c_down = get_number(k, "c_down", "crit", c.crit.c_down);
    checked("crit", [&] { c.crit.validate(); });
  }

  checked("config", [&] { c.validate(); });
  if (doc.contains("schedule")) rc.schedule = schedule_from_json(doc["schedule"]);
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path, const SimConfig& base) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), base);
}

}  // namespace solitrain::cli
