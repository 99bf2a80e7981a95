#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "solitrain/protocol.hpp"
#include "solitrain/simulation.hpp"

namespace solitrain::cli {

// Parsed run-config document. The schedule section is optional: calibrate and
// compute build their own schedules.
struct RunConfig {
  SimConfig sim;
  std::optional<StepSchedule> schedule;
};

// JSON with // and /* */ comments. Sections: grid, initial, evolution,
// detector, schedule, crit. Unknown keys are rejected; every error message
// names the offending key path. Missing sections keep `base`'s values.
RunConfig parse_run_config(const std::string& text, const SimConfig& base = {});
RunConfig load_run_config(const std::filesystem::path& path, const SimConfig& base = {});

nlohmann::json schedule_to_json(const StepSchedule& schedule);
StepSchedule schedule_from_json(const nlohmann::json& j, const std::string& path = "schedule");
nlohmann::json sim_config_to_json(const SimConfig& config);

}  // namespace solitrain::cli
