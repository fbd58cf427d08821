#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "footsim/protocols.hpp"
#include "footsim/scenarios.hpp"
#include "footsim/skills.hpp"

namespace footsim {

/// Everything a run reads from its config file. One JSON object with the
/// sections sim, motion, reward, episode, rollout, train, scenario and
/// protocol; absent sections and keys keep their defaults, unknown keys are
/// errors.
struct RunConfig {
    SimConfig sim;
    MotionConfig motion;
    RewardConfig reward;
    EpisodeConfig episode;
    double degcl_fraction{RolloutConfig{}.degcl_fraction};
    /// Its rollout section is ignored; train_config() fills it in.
    TrainConfig train;
    /// Its sim, motion and reward are ignored; scenario_config() fills them in.
    ScenarioConfig scenario;
    double protocol_scale{1.0};

    void validate() const;

    RolloutConfig rollout() const;
    TrainConfig train_config() const;
    ScenarioConfig scenario_config() const;
    /// Protocol settings carrying this config's hash.
    ProtocolConfig protocol_config() const;
};

RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical JSON with every key present and keys sorted.
std::string to_json(const RunConfig& cfg);
/// FNV-1a 64 of the canonical JSON.
std::uint64_t config_hash(const RunConfig& cfg);

}  // namespace footsim
