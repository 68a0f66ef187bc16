#pragma once

#include <Eigen/Core>
#include <vector>

#include "oc/features.hpp"
#include "oc/mdp.hpp"
#include "oc/policies.hpp"

namespace oc {

enum class CriticVariant {
    qu_primary,     // store Q_U(s,omega,a); Q_Omega always derived from it
    qomega_primary  // store Q_Omega(s,omega); Q_U estimated per step by the g1 target
};

enum class VOmegaMode {
    greedy,        // V_Omega = max_omega Q_Omega
    epsilon_soft   // V_Omega = expectation under the epsilon-greedy distribution
};

/// Q_Omega row, V_Omega under the configured convention, and the advantage
/// A_Omega = Q_Omega - V_Omega at one state.
struct ValueBundle {
    Eigen::VectorXd q_row;
    double v = 0.0;
    Eigen::VectorXd advantage;
};

/// Linear option-value critic over a feature map; tabular is the one-hot
/// special case. Single writer during training.
class CriticStore {
public:
    CriticStore(CriticVariant variant, int n_options, int n_actions, int n_features,
                double lr_critic);

    CriticVariant variant() const { return variant_; }
    int n_options() const { return n_options_; }
    int n_actions() const { return n_actions_; }
    int n_features() const { return n_features_; }

    /// Enable per-feature learning-rate scaling (Fourier critics).
    void set_lr_scaling(const Eigen::VectorXd& divisors);

    double q_u(int option, int action, const FeatureVec& phi) const;

    double q_omega(const IntraOptionPolicy& pol, int option, const FeatureVec& phi) const;
    Eigen::VectorXd q_omega_row(const IntraOptionPolicy& pol, const FeatureVec& phi) const;

    double v_omega(const Eigen::Ref<const Eigen::VectorXd>& q_row, VOmegaMode mode,
                   const PolicyOverOptions& pi_omega) const;
    ValueBundle values(const IntraOptionPolicy& pol, const FeatureVec& phi, VOmegaMode mode,
                       const PolicyOverOptions& pi_omega) const;

    /// One-step off-policy target: r if done, else
    /// r + gamma ((1-beta) Q_Omega(s',omega) + beta max Q_Omega(s',.)).
    double g1_target(const IntraOptionPolicy& pol, const TerminationFunction& tf, double reward,
                     const FeatureVec& next_phi, int option, bool done, double gamma) const;

    /// TD update toward the g1 target. Returns the TD error delta; throws
    /// DivergenceError when delta is non-finite or exceeds 1e8.
    double update(const IntraOptionPolicy& pol, const TerminationFunction& tf,
                  const FeatureVec& phi, int option, int action, double reward,
                  const FeatureVec& next_phi, bool done, double gamma);

    double lr_critic;
    std::vector<Eigen::MatrixXd> qu_weights;  // [option](action, feature), qu_primary
    Eigen::MatrixXd qomega_weights;           // (option, feature), qomega_primary

private:
    CriticVariant variant_;
    int n_options_, n_actions_, n_features_;
    bool scaled_lr_ = false;
    Eigen::VectorXd inv_scale_;  // 1 / divisor per feature
};

}  // namespace oc
