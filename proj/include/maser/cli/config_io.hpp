#pragma once

#include "maser/env/skirmish.hpp"
#include "maser/train/config.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace maser::cli {

// Config files are flat JSON objects whose keys are listed by config_keys().
// An optional "environment" object replaces the built-in map named by "env"
// (see env::skirmish_config_from_json for its keys). A run manifest is also
// accepted as a config file: its "config" and "environment" members are used.

/// Every accepted top-level key, sorted.
std::vector<std::string> config_keys();

nlohmann::json config_to_json(const train::TrainConfig& config);
/// Applies the keys of `j` on top of `base`. Unknown keys raise ConfigError
/// listing the valid ones; the result is validated.
train::TrainConfig config_from_json(const nlohmann::json& j, train::TrainConfig base = {});

/// A resolved run setup: hyperparameters plus the environment they drive.
struct RunSpec {
    train::TrainConfig config;
    /// Set when the file carried an explicit environment object.
    std::optional<env::SkirmishConfig> environment;

    /// The environment the run trains on, with the configured reward mode.
    env::SkirmishConfig resolved_environment() const;
};

/// Defaults, then the file (when given), then `overrides`, which uses the
/// same flat keys as the file.
RunSpec parse_config(const std::optional<std::filesystem::path>& file, const nlohmann::json& overrides);

nlohmann::json read_json_file(const std::filesystem::path& path);

} // namespace maser::cli
