#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "rydpol/units.hpp"

namespace rydpol {

/// Serializes every field with its snake_case key.
nlohmann::json to_json(const ExperimentConfig& config);

/// Missing keys keep their defaults; unknown keys are a hard error.
/// The result is validated before it is returned.
ExperimentConfig config_from_json(const nlohmann::json& doc);

ExperimentConfig load_config(const std::filesystem::path& path);

/// Resolution order: explicit path, then $RYDPOL_CONFIG, then built-in defaults.
ExperimentConfig resolve_config(const std::string& explicit_path);

}  // namespace rydpol
