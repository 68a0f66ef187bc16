#pragma once

#include <stdexcept>
#include <string>

#include "oc/agent.hpp"

namespace oc {

struct ConfigError : std::runtime_error {
    ConfigError(int line, const std::string& what)
        : std::runtime_error(what), line(line) {}
    int line;  // 0 when not tied to a config line
};

/// One experiment definition: environment, agent variant, run fan-out and
/// output locations. Defaults follow the four-rooms setup (gamma 0.99,
/// temperature 0.001, 4 options); unknown keys in a config file are hard
/// errors.
struct RunConfig {
    std::string env = "fourrooms";  // fourrooms | pinball | mdp-file
    std::string agent = "oc";       // oc | sarsa | ac
    std::string mdp_file;
    int runs = 1;
    std::uint64_t base_seed = 1;
    std::string output_dir = "out";
    int checkpoint_every = 0;  // episodes between snapshots; 0 = final only

    AgentConfig agent_cfg;      // episodes, seeds and learning settings
    int max_steps_override = 0; // 0 = per-environment default

    int relocation_episode = 1000;  // fourrooms

    std::string pinball_maze;  // empty = built-in default maze
    int fourier_order = 3;
    int pinball_substeps = 20;
    double pinball_thrust = 0.2;
    double pinball_drag = 0.995;
};

/// Parse the flat `key = value` format with [section] headers:
/// sections run, agent, actor, fourrooms, pinball. Throws ConfigError with
/// the offending line number.
RunConfig parse_config(std::istream& in);
RunConfig parse_config_file(const std::string& path);

}  // namespace oc
