#include "solitrain/exports.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>

#include "solitrain/error.hpp"

namespace solitrain::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

json measurement_to_json(const FrequencyMeasurement& m) {
  json j{{"f", m.f}, {"count", m.count}, {"jitter", nullptr}};
  if (m.jitter) j["jitter"] = *m.jitter;
  return j;
}

namespace {

std::ofstream open_out(const fs::path& p, std::ios::openmode mode = std::ios::out) {
  std::ofstream os(p, mode | std::ios::trunc);
  if (!os) throw Error("cannot write " + p.string());
  return os;
}

void write_column(const fs::path& p, const char* name, const std::vector<double>& values) {
  auto os = open_out(p);
  os << name << '\n';
  for (double v : values) os << format_double(v) << '\n';
}

}  // namespace

void write_density_csv(std::ostream& os, const Trajectory& traj, std::size_t component) {
  const auto& grid = traj.grid;
  os << 't';
  for (std::size_t j = 0; j < grid.size(); ++j) os << ',' << format_double(grid.z(j));
  os << '\n';
  for (std::size_t k = 0; k < traj.snapshot_count(); ++k) {
    os << format_double(traj.times[k]);
    for (double v : traj.snapshot(component, k)) os << ',' << format_double(v);
    os << '\n';
  }
}

void write_density_binary(const fs::path& data, const fs::path& header, const Trajectory& traj,
                          std::size_t component) {
  const auto& rec = traj.density_records.at(component);
  {
    auto os = open_out(data, std::ios::binary);
    if constexpr (std::endian::native == std::endian::little) {
      os.write(reinterpret_cast<const char*>(rec.data()), static_cast<std::streamsize>(rec.size() * sizeof(double)));
    } else {
      for (double v : rec) {
        auto bits = std::bit_cast<std::uint64_t>(v);
        std::array<char, 8> b{};
        for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
        os.write(b.data(), 8);
      }
    }
  }
  const double dt_record = traj.snapshot_count() > 1 ? traj.times[1] - traj.times[0] : 0.0;
  auto os = open_out(header);
  os << "format f64le\n"
     << "n_rows " << traj.snapshot_count() << '\n'
     << "n_cols " << traj.grid.size() << '\n'
     << "dz " << format_double(traj.grid.dz()) << '\n'
     << "dt_record " << format_double(dt_record) << '\n'
     << "z_first " << format_double(traj.grid.z(0)) << '\n'
     << "t_first " << format_double(traj.times.empty() ? 0.0 : traj.times.front()) << '\n';
}

std::vector<fs::path> write_simulation(const fs::path& dir, const SimulationOutput& out, const ExportOptions& options) {
  const Trajectory& traj = *out.trajectory;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());

  std::vector<fs::path> written;
  auto add = [&](fs::path p) {
    written.push_back(p);
    return p;
  };
  write_column(add(dir / "times.csv"), "t", traj.times);
  write_column(add(dir / "grid.csv"), "z", traj.grid.coordinates());

  for (std::size_t i = 0; i < traj.component_count(); ++i) {
    const std::string id = std::to_string(i);
    {
      auto os = open_out(add(dir / ("density_" + id + ".csv")));
      write_density_csv(os, traj, i);
    }
    if (options.binary) {
      write_density_binary(add(dir / ("density_" + id + ".f64")), add(dir / ("density_" + id + ".hdr")), traj, i);
    }
    {
      auto os = open_out(add(dir / ("line_" + id + ".csv")));
      os << "t,density\n";
      for (std::size_t k = 0; k < traj.line_times.size(); ++k)
        os << format_double(traj.line_times[k]) << ',' << format_double(traj.line_samples[i][k]) << '\n';
    }
    if (i < out.logs.size()) {
      auto os = open_out(add(dir / ("events_" + id + ".csv")));
      os << "t,depth,width\n";
      for (const auto& e : out.logs[i].events)
        os << format_double(e.t) << ',' << format_double(e.depth) << ',' << format_double(e.width) << '\n';
    }
  }

  json report{{"probe_z", traj.probe_z},
              {"window", {out.window.t_start, out.window.t_end}},
              {"fingerprint", out.fingerprint},
              {"blowup_time", nullptr},
              {"components", json::array()}};
  if (traj.blowup_time) report["blowup_time"] = *traj.blowup_time;
  for (const auto& m : out.measurements) report["components"].push_back(measurement_to_json(m));
  auto os = open_out(add(dir / "frequency.json"));
  os << report.dump(2) << '\n';
  return written;
}

}  // namespace solitrain::cli
