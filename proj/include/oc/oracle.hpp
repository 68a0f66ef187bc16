#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "oc/features.hpp"
#include "oc/mdp.hpp"
#include "oc/policies.hpp"

namespace oc {

/// A finite MDP together with parametrized option components and an
/// explicitly materialized (frozen) policy over options. The policy over
/// options is held fixed under differentiation: the gradient results treat
/// theta and vartheta as the only differentiated parameters, so the
/// finite-difference checks must freeze pi_Omega the same way.
struct OptionModel {
    TabularMDP mdp;
    FeatureMap features;  // one-hot over states
    IntraOptionPolicy policy;
    TerminationFunction termination;
    Eigen::MatrixXd pi_omega;  // (state, option) selection probabilities

    int n_options() const { return policy.n_options(); }
    Eigen::VectorXd action_probs(int s, int option) const {
        return policy.action_probs(option, features.featurize(s));
    }
    double beta(int s, int option) const {
        return termination.term_prob(option, features.featurize(s));
    }
};

/// Discounted one-step transition operator over (state, option) pairs,
/// under both conditionings:
///   same:    rows (s_t, omega_t)     -> cols (s_{t+1}, omega_{t+1})
///   shifted: rows (s_t, omega_{t-1}) -> cols (s_{t+1}, omega_t)
/// The discount factor is folded in, so every non-terminal row sums to
/// gamma exactly; rows of terminal states are zero (episode over).
struct AugmentedChain {
    int n_states = 0;
    int n_options = 0;
    Eigen::MatrixXd p1_same;
    Eigen::MatrixXd p1_shifted;

    int n_pairs() const { return n_states * n_options; }
    int idx(int s, int option) const { return s * n_options + option; }
};

enum class ChainConditioning { same, shifted };

AugmentedChain build_chain(const OptionModel& model);

/// The option-reselection operator R[(s,w_prev),(s,w)] =
/// (1-beta_{w_prev}(s)) 1{w=w_prev} + beta_{w_prev}(s) pi_Omega(w|s).
/// Satisfies p1_shifted = R * M and p1_same = M * R, where M moves one
/// discounted step under the current option.
Eigen::MatrixXd reselection_matrix(const OptionModel& model);

/// Exact option values: the unique solution of the evaluation equations for
/// gamma < 1, with values pinned to zero at terminal states.
struct ExactValues {
    Eigen::MatrixXd q_omega;            // (state, option)
    std::vector<Eigen::MatrixXd> q_u;   // [option](state, action)
    Eigen::MatrixXd u;                  // (option, state)
    Eigen::VectorXd v_omega;            // (state); expectation under pi_omega
    double rho = 0.0;                   // start-weighted expected discounted return
};

/// Dense direct solve of the Q_Omega linear system (dimension |S||Omega|,
/// capped at 2000), then Q_U, U, V_Omega and rho derived from it.
ExactValues exact_values(const OptionModel& model);

/// mu = start_weights' (I - P)^{-1}: the discounted occupancy of
/// state-option pairs, i.e. the Neumann series sum_t P^t.
Eigen::VectorXd discounted_weighting(const AugmentedChain& chain,
                                     const Eigen::VectorXd& start_weights,
                                     ChainConditioning conditioning);

Eigen::VectorXd pair_point_mass(const AugmentedChain& chain, int s, int option);

/// Start-pair weights start_dist(s) * pi_omega(w|s); rho in ExactValues is
/// taken against these.
Eigen::VectorXd start_pair_weights(const OptionModel& model);

/// Analytic gradient of the expected discounted return over the intra-option
/// policy parameters, for the given start-pair weighting.
std::vector<Eigen::MatrixXd> intra_policy_gradient(const OptionModel& model,
                                               const Eigen::VectorXd& start_weights);

/// Analytic gradient of U(omega0, s1) over the termination parameters.
Eigen::MatrixXd termination_gradient_exact(const OptionModel& model, int s1, int omega0);

/// Central finite differences of the exact objectives; the frozen pi_omega
/// is shared with the analytic path.
std::vector<Eigen::MatrixXd> fd_intra_policy_gradient(const OptionModel& model,
                                                  const Eigen::VectorXd& start_weights,
                                                  double h = 1e-6);
Eigen::MatrixXd fd_termination_gradient(const OptionModel& model, int s1, int omega0,
                                     double h = 1e-6);

/// Exact solution of the intra-option Q-learning fixed point
///   Q_U(s,w,a) = r(s,a) + gamma sum_s' P(s'|s,a)
///                [(1-beta_w(s')) Q_Omega(s',w) + beta_w(s') max_w' Q_Omega(s',w')]
/// with Q_Omega the action expectation of Q_U; value-iteration to 1e-13.
std::vector<Eigen::MatrixXd> intra_q_fixed_point(const OptionModel& model);

/// Relative error of an analytic/numeric pair of gradients: the largest
/// componentwise deviation measured against max(|analytic|, |numeric|, 1e-8)
/// where |.| is the largest magnitude in either tensor.
double gradient_rel_error(const std::vector<Eigen::MatrixXd>& a,
                          const std::vector<Eigen::MatrixXd>& b);
double gradient_rel_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Epsilon-greedy selection probabilities per state, from a Q_Omega table.
Eigen::MatrixXd epsilon_greedy_probs(const Eigen::MatrixXd& q_omega, double epsilon);

struct RandomInstance {
    OptionModel model;
    int start_state = 0;
    int start_option = 0;
    std::uint64_t seed = 0;
};

/// Random verify instance: Dirichlet transition rows, rewards in [-1,1],
/// gamma in [0.4,0.9], optional terminal state, Boltzmann/sigmoid parameters
/// in [-1,1] at temperature 1, pi_omega materialized as epsilon-greedy (0.1)
/// against the uniform-selection solution and then frozen.
RandomInstance random_instance(std::uint64_t seed, int max_states, int max_actions,
                               int max_options);

struct VerifyOptions {
    int instances = 20;
    int max_states = 5;
    int max_actions = 3;
    int max_options = 3;
    std::uint64_t seed = 7;
    bool corrupt_gradient = false;  // test hook: corrupts the intra-option policy gradient
};

struct InstanceStats {
    int index = 0;
    int n_states = 0, n_actions = 0, n_options = 0;
    std::uint64_t seed = 0;
    double chain_row_err = 0.0;    // |row sum - gamma|, both conditionings
    double factor_err = 0.0;       // chain vs reselection factorization
    double residual = 0.0;         // evaluation-equation plug-back
    double intra_grad_rel = 0.0;
    double term_grad_rel = 0.0;
    double fixpoint_err = 0.0;     // fixed point vs greedy-materialized solve
    double mu_series_err = 0.0;    // weighting vs truncated power series
    bool pass = false;
};

struct VerifyReport {
    std::vector<InstanceStats> instances;
    bool pass = false;
    int failing_index = -1;
    std::string failing_mdp_text;  // replay fixture for the first failure
    double worst_chain = 0.0, worst_factor = 0.0, worst_residual = 0.0;
    double worst_intra_grad = 0.0, worst_term_grad = 0.0, worst_fixpoint = 0.0, worst_mu = 0.0;
};

/// The full oracle property battery over randomized instances. Thresholds:
/// chain rows 1e-12, residuals 1e-10, gradients-vs-FD 1e-5, fixed point 1e-9.
VerifyReport run_verify(const VerifyOptions& opts);

}  // namespace oc
