#pragma once

#include <Eigen/Core>
#include <vector>

#include "oc/agent.hpp"
#include "oc/env.hpp"

namespace oc {

/// Flat SARSA(0) with Boltzmann exploration, no eligibility traces.
/// Linear over the feature map (tabular with one-hot features).
struct SarsaAgent {
    Eigen::MatrixXd q;  // (action, feature)
    double temperature;
};

/// Flat one-step actor-critic with a Boltzmann policy and TD(0) state-value
/// critic.
struct ActorCriticAgent {
    Eigen::MatrixXd policy_weights;  // (action, feature)
    Eigen::VectorXd value_weights;   // (feature)
    double temperature;
};

/// Both baselines reuse AgentConfig: lr_critic drives the value updates and
/// actor.lr_intra the AC-PG policy step. Logs report zero option switches
/// and a mean option duration equal to the episode length.
struct BaselineResult {
    std::vector<EpisodeLog> logs;
    Eigen::MatrixXd q_or_policy;
    Eigen::VectorXd value;
};

BaselineResult train_sarsa(Env& env, const FeatureMap& features, const AgentConfig& cfg);
BaselineResult train_actor_critic(Env& env, const FeatureMap& features, const AgentConfig& cfg);

}  // namespace oc
