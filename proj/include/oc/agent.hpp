#pragma once

#include <vector>

#include "oc/actor.hpp"
#include "oc/critic.hpp"
#include "oc/env.hpp"
#include "oc/features.hpp"
#include "oc/policies.hpp"

namespace oc {

/// Hyperparameters of one option-critic training run.
struct AgentConfig {
    int n_options = 4;
    double epsilon = 0.01;      // policy over options
    double temperature = 0.001; // Boltzmann intra-option policies
    double gamma = 0.99;
    double lr_critic = 0.5;
    ActorConfig actor;
    CriticVariant critic_variant = CriticVariant::qu_primary;
    VOmegaMode vomega_mode = VOmegaMode::greedy;
    bool fourier_lr_scaling = true;  // applies to fourier critics only
    double init_scale = 0.0;         // actor weights ~ U(-s, s); 0 keeps all-zero init
    int episodes = 1000;
    int max_steps_per_episode = 50000;
    std::uint64_t seed = 1;
};

/// Per-episode record backing the CSV output.
struct EpisodeLog {
    int episode = 0;
    int steps = 0;
    double undiscounted_return = 0.0;
    double discounted_return = 0.0;
    int option_switches = 0;  // sampled termination events (episode end excluded)
    double mean_option_duration = 0.0;  // steps / (option_switches + 1)
    std::vector<long> option_usage;     // steps executed under each option
};

/// The learnable state of an option-critic agent.
struct OptionAgent {
    IntraOptionPolicy policy;
    TerminationFunction termination;
    PolicyOverOptions policy_over_options;
    CriticStore critic;
};

OptionAgent make_agent(const AgentConfig& cfg, const FeatureMap& features, int n_actions,
                       RngStream& rng);

/// One call-and-return episode with in-loop learning: every transition runs
/// one critic update, one intra-option policy step and one termination step,
/// in that order. A new option is drawn only at episode start and after a
/// sampled termination.
EpisodeLog run_episode(Env& env, OptionAgent& agent, const FeatureMap& features,
                       const AgentConfig& cfg, int episode_index, RngStream& rng);

struct TrainResult {
    std::vector<EpisodeLog> logs;
    OptionAgent agent;
};

TrainResult train(Env& env, const FeatureMap& features, const AgentConfig& cfg);

}  // namespace oc
