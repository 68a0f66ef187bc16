#pragma once

#include "oc/critic.hpp"
#include "oc/policies.hpp"

namespace oc {

/// Gradient-ascent settings for the two actor updates.
struct ActorConfig {
    double lr_intra = 0.25;
    double lr_term = 0.25;
    bool use_baseline = false;  // subtract Q_Omega(s,omega) from the Q_U coefficient
    double xi = 0.0;            // margin added to the advantage in the termination step
    double entropy_coeff = 0.0;
};

/// Intra-option policy ascent step:
/// theta_omega += lr_intra * dlogpi(a|s) * (q_u_sample - baseline)
///              + lr_intra * entropy_coeff * dH.
/// No-op when lr_intra == 0 (pure-evaluation runs stay bit-identical).
void intra_policy_step(IntraOptionPolicy& pol, const ActorConfig& cfg, const FeatureVec& phi,
                       int option, int action, double q_u_sample, double q_omega_baseline);

/// Termination descent step at the arrival state:
/// vartheta_omega -= lr_term * dbeta(s') * (advantage + xi).
void termination_step(TerminationFunction& tf, const ActorConfig& cfg, const FeatureVec& next_phi,
                      int option, double advantage);

}  // namespace oc
