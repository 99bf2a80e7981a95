#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "solitrain/protocol.hpp"
#include "solitrain/simulation.hpp"

namespace solitrain {

struct CalibrationSample {
  double s = 0.0;
  // Absent for gap samples (blow-up during the run).
  std::optional<double> f;

  bool operator==(const CalibrationSample&) const = default;
};

// Monotone frequency-versus-ratio map for one branch.
//   r:  s strictly increasing, f nondecreasing in s, f = 0 for s <= c_up.
//   ra: s strictly increasing, f nonincreasing in s (grows as s drops below c_down).
struct CalibrationTable {
  Branch branch = Branch::r;
  std::vector<CalibrationSample> samples;
  CritConstants crit;
  std::string fingerprint;

  // Throws CalibrationError listing the offending samples.
  void validate() const;
  double max_frequency() const;
  bool operator==(const CalibrationTable&) const = default;
};

// Runs one single-component quench per ratio (in parallel, up to `jobs`
// threads; 0 = hardware concurrency). Blow-up with fewer than two events
// yields a gap sample.
std::vector<CalibrationSample> sweep(const std::vector<double>& s_values, Branch branch, const SimConfig& config,
                                     unsigned jobs = 0);
// Validated table from sweep output; throws CalibrationError.
CalibrationTable assemble_table(std::vector<CalibrationSample> samples, Branch branch, const SimConfig& config);
// sweep + assemble_table.
CalibrationTable calibrate(const std::vector<double>& s_values, Branch branch, const SimConfig& config,
                           unsigned jobs = 0);

// Number <-> ratio map: s = a + c_up (r) or s = -a + c_down (ra).
double encode(double a, Branch branch, const CritConstants& crit = {});
double ratio_to_number(double s, Branch branch, const CritConstants& crit = {});

// Inverts f -> s by monotone piecewise-linear interpolation, then s -> a.
// decode(0) is 0. Throws DecodeRangeError above the table's range.
double decode(double f, const CalibrationTable& table);

void save_table(const CalibrationTable& table, const std::filesystem::path& path);
std::string format_table(const CalibrationTable& table);

// With `expected_fingerprint`, a mismatch throws FingerprintMismatch unless
// `strict` is false, in which case a warning is written to `warnings`.
CalibrationTable load_table(const std::filesystem::path& path,
                            const std::optional<std::string>& expected_fingerprint = std::nullopt,
                            bool strict = true, std::string* warnings = nullptr);
CalibrationTable parse_table(const std::string& text);

}  // namespace solitrain
