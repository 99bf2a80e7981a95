#include "solitrain/calibration.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "solitrain/error.hpp"

namespace solitrain {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Non-gap samples ordered so that f is nondecreasing along the sequence.
std::vector<std::pair<double, double>> lookup_order(const CalibrationTable& t) {
  std::vector<std::pair<double, double>> out;
  for (const auto& s : t.samples)
    if (s.f) out.emplace_back(s.s, *s.f);
  if (t.branch == Branch::ra) std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace

void CalibrationTable::validate() const {
  crit.validate();
  std::ostringstream bad;
  for (std::size_t k = 1; k < samples.size(); ++k) {
    if (!(samples[k].s > samples[k - 1].s)) {
      bad << " s not strictly increasing at (" << samples[k - 1].s << ", " << samples[k].s << ");";
    }
  }
  for (const auto& s : samples) {
    if (s.f && !(*s.f >= 0.0)) bad << " negative frequency at s=" << s.s << ';';
    const bool below = branch == Branch::r ? s.s <= crit.c_up : s.s >= crit.c_down;
    if (below && s.f && *s.f != 0.0) bad << " nonzero f=" << *s.f << " at subcritical s=" << s.s << ';';
  }
  const auto seq = lookup_order(*this);
  for (std::size_t k = 1; k < seq.size(); ++k) {
    if (seq[k].second < seq[k - 1].second) {
      bad << " non-monotone f between s=" << seq[k - 1].first << " (f=" << seq[k - 1].second << ") and s="
          << seq[k].first << " (f=" << seq[k].second << ");";
    }
  }
  const auto msg = bad.str();
  if (!msg.empty()) throw CalibrationError("calibration table (branch " + std::string(to_string(branch)) +
                                           ") violates its invariants:" + msg);
}

double CalibrationTable::max_frequency() const {
  double m = 0.0;
  for (const auto& s : samples)
    if (s.f) m = std::max(m, *s.f);
  return m;
}

std::vector<CalibrationSample> sweep(const std::vector<double>& s_values, Branch branch, const SimConfig& config,
                                     unsigned jobs) {
  config.validate();
  if (s_values.empty()) throw ValidationError("calibration needs at least one ratio");
  for (std::size_t k = 0; k < s_values.size(); ++k) {
    const double s = s_values[k];
    if (!std::isfinite(s)) throw ValidationError("calibration ratios must be finite");
    if (k > 0 && !(s > s_values[k - 1])) throw ValidationError("calibration ratios must be strictly increasing");
    if (branch == Branch::r && s < 1.0) throw ValidationError("branch r ratios must be >= 1, got " + fmt(s));
    if (branch == Branch::ra && s > config.crit.c_down) {
      throw ValidationError("branch ra ratios must be <= c_down, got " + fmt(s));
    }
  }

  SimConfig run_config = config;
  if (branch == Branch::ra) run_config.evolution.truncate_on_blowup = true;

  std::vector<CalibrationSample> samples(s_values.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < s_values.size(); k = next++) {
      try {
        bool blow_up = false;
        const auto m = measure_schedule(make_quench(s_values[k]), run_config, &blow_up);
        samples[k].s = s_values[k];
        if (blow_up && m.count <= 1) {
          samples[k].f = std::nullopt;
        } else {
          samples[k].f = m.f;
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  unsigned n_threads = jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : jobs;
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(s_values.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return samples;
}

CalibrationTable assemble_table(std::vector<CalibrationSample> samples, Branch branch, const SimConfig& config) {
  CalibrationTable table{branch, std::move(samples), config.crit, fingerprint(config)};
  table.validate();
  return table;
}

CalibrationTable calibrate(const std::vector<double>& s_values, Branch branch, const SimConfig& config,
                           unsigned jobs) {
  return assemble_table(sweep(s_values, branch, config, jobs), branch, config);
}

double encode(double a, Branch branch, const CritConstants& crit) {
  if (!(a >= 0.0) || !std::isfinite(a)) throw ValidationError("encode needs a finite number a >= 0");
  return branch == Branch::r ? a + crit.c_up : -a + crit.c_down;
}

double ratio_to_number(double s, Branch branch, const CritConstants& crit) {
  return branch == Branch::r ? s - crit.c_up : crit.c_down - s;
}

double decode(double f, const CalibrationTable& table) {
  if (!(f >= 0.0) || !std::isfinite(f)) throw ValidationError("decode needs a finite frequency f >= 0");
  if (f == 0.0) return 0.0;
  auto seq = lookup_order(table);
  const double threshold = table.branch == Branch::r ? table.crit.c_up : table.crit.c_down;
  if (seq.empty() || seq.front().second > 0.0) seq.insert(seq.begin(), {threshold, 0.0});
  const auto it = std::find_if(seq.begin(), seq.end(), [&](const auto& p) { return p.second >= f; });
  if (it == seq.end()) {
    std::ostringstream msg;
    msg << "frequency f=" << f << " exceeds the calibrated range (max f=" << seq.back().second
        << "); extend the calibration sweep";
    throw DecodeRangeError(msg.str());
  }
  // f > 0 and seq.front() has f == 0, so it has a predecessor.
  const auto& [s1, f1] = *it;
  const auto& [s0, f0] = *(it - 1);
  const double s = s0 + (f - f0) / (f1 - f0) * (s1 - s0);
  return ratio_to_number(s, table.branch, table.crit);
}

std::string format_table(const CalibrationTable& table) {
  std::ostringstream out;
  out << "# branch=" << to_string(table.branch) << '\n'
      << "# c_up=" << fmt(table.crit.c_up) << '\n'
      << "# c_down=" << fmt(table.crit.c_down) << '\n'
      << "# fingerprint=" << table.fingerprint << '\n'
      << "s,f\n";
  for (const auto& s : table.samples) out << fmt(s.s) << ',' << (s.f ? fmt(*s.f) : std::string("nan")) << '\n';
  return out.str();
}

void save_table(const CalibrationTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
  out << format_table(table);
  if (!out) throw ValidationError("failed writing " + path.string());
}

namespace {
double parse_number(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ValidationError("table: cannot parse " + what + " '" + text + "'");
  }
  if (used != text.size()) throw ValidationError("table: trailing characters in " + what + " '" + text + "'");
  return v;
}
}  // namespace

CalibrationTable parse_table(const std::string& text) {
  CalibrationTable table;
  bool have_branch = false, have_up = false, have_down = false, have_fp = false, have_header = false;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ValidationError("table line " + std::to_string(lineno) + ": malformed header");
      const auto key = line.substr(2, eq - 2);
      const auto value = line.substr(eq + 1);
      if (key == "branch") {
        table.branch = branch_from_string(value.c_str());
        have_branch = true;
      } else if (key == "c_up") {
        table.crit.c_up = parse_number(value, "c_up");
        have_up = true;
      } else if (key == "c_down") {
        table.crit.c_down = parse_number(value, "c_down");
        have_down = true;
      } else if (key == "fingerprint") {
        table.fingerprint = value;
        have_fp = true;
      } else {
        throw ValidationError("table line " + std::to_string(lineno) + ": unknown header key '" + key + "'");
      }
      continue;
    }
    if (!have_header) {
      if (line != "s,f") throw ValidationError("table line " + std::to_string(lineno) + ": expected 's,f' header");
      have_header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ValidationError("table line " + std::to_string(lineno) + ": expected s,f");
    CalibrationSample sample;
    sample.s = parse_number(line.substr(0, comma), "s");
    const auto fs = line.substr(comma + 1);
    if (fs != "nan") sample.f = parse_number(fs, "f");
    table.samples.push_back(sample);
  }
  if (!(have_branch && have_up && have_down && have_fp && have_header)) {
    throw ValidationError("table is missing required header lines (branch, c_up, c_down, fingerprint, s,f)");
  }
  table.validate();
  return table;
}

CalibrationTable load_table(const std::filesystem::path& path, const std::optional<std::string>& expected,
                            bool strict, std::string* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open calibration table " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  auto table = parse_table(buf.str());
  if (expected && table.fingerprint != *expected) {
    const std::string msg = "calibration table " + path.string() + " was built with config fingerprint " +
                            table.fingerprint + " but the current config has " + *expected;
    if (strict) throw FingerprintMismatch(msg);
    if (warnings) *warnings += "warning: " + msg + "\n";
  }
  return table;
}

}  // namespace solitrain
