#pragma once

#include <Eigen/Core>
#include <vector>

#include "oc/features.hpp"
#include "oc/rng.hpp"

namespace oc {

/// Index of the largest entry; ties resolve to the lowest index.
int argmax_lowest(const Eigen::Ref<const Eigen::VectorXd>& v);

/// Boltzmann intra-option policies pi_{omega,theta}. One weight matrix
/// (actions x features) per option; action probabilities are
/// softmax(W_omega * phi / tau), stabilized by max-subtraction. The
/// distribution is everywhere-stochastic in exact arithmetic; at extreme
/// temperatures tail entries can underflow to 0.0 in doubles.
class IntraOptionPolicy {
public:
    IntraOptionPolicy(int n_options, int n_actions, int n_features, double temperature);

    int n_options() const { return static_cast<int>(weights.size()); }
    int n_actions() const { return n_actions_; }
    int n_features() const { return n_features_; }

    Eigen::VectorXd action_probs(int option, const FeatureVec& phi) const;

    /// d log pi(a|s) / d theta_omega: (1/tau) * (e_a - pi) outer phi.
    Eigen::MatrixXd logpi_grad(int option, const FeatureVec& phi, int action) const;

    double entropy(int option, const FeatureVec& phi) const;

    /// d H / d theta_omega; row a is -(pi_a (log pi_a + H) / tau) * phi.
    Eigen::MatrixXd entropy_grad(int option, const FeatureVec& phi) const;

    std::vector<Eigen::MatrixXd> weights;  // [option](action, feature)
    double temperature;

private:
    Eigen::VectorXd logits(int option, const FeatureVec& phi) const;
    int n_actions_ = 0;
    int n_features_ = 0;
};

/// Sigmoid termination functions beta_{omega,vartheta}; one weight vector
/// per option. Never clamped: saturation vanishes the gradient instead.
class TerminationFunction {
public:
    TerminationFunction(int n_options, int n_features);

    int n_options() const { return static_cast<int>(weights.rows()); }
    int n_features() const { return static_cast<int>(weights.cols()); }

    double term_prob(int option, const FeatureVec& phi) const;

    /// d beta / d vartheta_omega = beta (1 - beta) phi.
    Eigen::VectorXd beta_grad(int option, const FeatureVec& phi) const;

    Eigen::MatrixXd weights;  // (option, feature)
};

/// Epsilon-soft greedy policy over options: with probability 1-eps the
/// argmax of the Q_Omega row (ties to lowest index), else uniform.
struct PolicyOverOptions {
    double epsilon = 0.0;

    int select(const Eigen::Ref<const Eigen::VectorXd>& q_row, RngStream& rng) const;

    /// The selection distribution materialized exactly.
    Eigen::VectorXd probs(const Eigen::Ref<const Eigen::VectorXd>& q_row) const;
};

double sigmoid(double z);

}  // namespace oc
