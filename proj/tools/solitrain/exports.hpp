#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "solitrain/detection.hpp"
#include "solitrain/evolution.hpp"

namespace solitrain::cli {

// Shortest round-trip decimal form of v.
std::string format_double(double v);

nlohmann::json measurement_to_json(const FrequencyMeasurement& m);

struct ExportOptions {
  bool binary = false;
};

struct SimulationOutput {
  const Trajectory* trajectory = nullptr;
  std::vector<SolitonEventLog> logs;
  std::vector<FrequencyMeasurement> measurements;
  MeasureWindow window;
  std::string fingerprint;
};

// Writes, per component i: density_<i>.csv (first row "t" then z, one row per
// snapshot), line_<i>.csv, events_<i>.csv; plus times.csv, grid.csv and
// frequency.json. With binary, density_<i>.f64 and its .hdr sidecar too.
// Returns the written paths.
std::vector<std::filesystem::path> write_simulation(const std::filesystem::path& dir, const SimulationOutput& out,
                                                    const ExportOptions& options = {});

void write_density_csv(std::ostream& os, const Trajectory& traj, std::size_t component);
void write_density_binary(const std::filesystem::path& data, const std::filesystem::path& header,
                          const Trajectory& traj, std::size_t component);

}  // namespace solitrain::cli
