#include "oc/actor.hpp"

#include <cmath>

namespace oc {

void intra_policy_step(IntraOptionPolicy& pol, const ActorConfig& cfg, const FeatureVec& phi,
                       int option, int action, double q_u_sample, double q_omega_baseline) {
    if (cfg.lr_intra == 0.0) return;
    const double coeff = q_u_sample - (cfg.use_baseline ? q_omega_baseline : 0.0);
    if (!std::isfinite(coeff))
        throw DivergenceError("intra-option policy update coefficient is not finite");

    const Eigen::VectorXd p = pol.action_probs(option, phi);
    Eigen::VectorXd per_action = -p * coeff;
    per_action[action] += coeff;
    if (cfg.entropy_coeff != 0.0) {
        double h = 0.0;
        for (int a = 0; a < p.size(); ++a)
            if (p[a] > 0.0) h -= p[a] * std::log(p[a]);
        for (int a = 0; a < p.size(); ++a)
            per_action[a] -= cfg.entropy_coeff * p[a] * (std::log(p[a]) + h);
    }
    per_action *= cfg.lr_intra / pol.temperature;

    Eigen::MatrixXd& w = pol.weights[option];
    if (phi.hot >= 0)
        w.col(phi.hot) += per_action;
    else
        w.noalias() += per_action * phi.dense.transpose();
}

void termination_step(TerminationFunction& tf, const ActorConfig& cfg, const FeatureVec& next_phi,
                      int option, double advantage) {
    if (cfg.lr_term == 0.0) return;
    if (!std::isfinite(advantage))
        throw DivergenceError("termination update advantage is not finite");
    const double b = tf.term_prob(option, next_phi);
    const double coeff = -cfg.lr_term * b * (1.0 - b) * (advantage + cfg.xi);
    axpy(coeff, next_phi, tf.weights.row(option));
}

}  // namespace oc
