#include "oc/critic.hpp"

#include <cmath>

namespace oc {

CriticStore::CriticStore(CriticVariant variant, int n_options, int n_actions, int n_features,
                         double lr_critic)
    : lr_critic(lr_critic),
      variant_(variant),
      n_options_(n_options),
      n_actions_(n_actions),
      n_features_(n_features) {
    if (variant == CriticVariant::qu_primary)
        qu_weights.assign(n_options, Eigen::MatrixXd::Zero(n_actions, n_features));
    else
        qomega_weights = Eigen::MatrixXd::Zero(n_options, n_features);
}

void CriticStore::set_lr_scaling(const Eigen::VectorXd& divisors) {
    inv_scale_ = divisors.cwiseInverse();
    scaled_lr_ = true;
}

double CriticStore::q_u(int option, int action, const FeatureVec& phi) const {
    if (variant_ != CriticVariant::qu_primary)
        throw std::logic_error("q_u is stored only by the qu_primary critic");
    return dot(qu_weights[option].row(action), phi);
}

double CriticStore::q_omega(const IntraOptionPolicy& pol, int option,
                            const FeatureVec& phi) const {
    if (variant_ == CriticVariant::qomega_primary) return dot(qomega_weights.row(option), phi);
    const Eigen::VectorXd p = pol.action_probs(option, phi);
    double q = 0.0;
    for (int a = 0; a < n_actions_; ++a) q += p[a] * q_u(option, a, phi);
    return q;
}

Eigen::VectorXd CriticStore::q_omega_row(const IntraOptionPolicy& pol,
                                         const FeatureVec& phi) const {
    Eigen::VectorXd row(n_options_);
    for (int w = 0; w < n_options_; ++w) row[w] = q_omega(pol, w, phi);
    return row;
}

double CriticStore::v_omega(const Eigen::Ref<const Eigen::VectorXd>& q_row, VOmegaMode mode,
                            const PolicyOverOptions& pi_omega) const {
    if (mode == VOmegaMode::greedy) return q_row.maxCoeff();
    return pi_omega.probs(q_row).dot(q_row);
}

ValueBundle CriticStore::values(const IntraOptionPolicy& pol, const FeatureVec& phi,
                                VOmegaMode mode, const PolicyOverOptions& pi_omega) const {
    ValueBundle b;
    b.q_row = q_omega_row(pol, phi);
    b.v = v_omega(b.q_row, mode, pi_omega);
    b.advantage = b.q_row.array() - b.v;
    return b;
}

double CriticStore::g1_target(const IntraOptionPolicy& pol, const TerminationFunction& tf,
                              double reward, const FeatureVec& next_phi, int option, bool done,
                              double gamma) const {
    if (done) return reward;
    const double beta = tf.term_prob(option, next_phi);
    const Eigen::VectorXd row = q_omega_row(pol, next_phi);
    return reward + gamma * ((1.0 - beta) * row[option] + beta * row.maxCoeff());
}

double CriticStore::update(const IntraOptionPolicy& pol, const TerminationFunction& tf,
                           const FeatureVec& phi, int option, int action, double reward,
                           const FeatureVec& next_phi, bool done, double gamma) {
    const double target = g1_target(pol, tf, reward, next_phi, option, done, gamma);
    const double predicted = variant_ == CriticVariant::qu_primary
                                 ? q_u(option, action, phi)
                                 : dot(qomega_weights.row(option), phi);
    const double delta = target - predicted;
    if (!std::isfinite(delta) || std::abs(delta) > 1e8)
        throw DivergenceError("critic diverged: delta = " + format_double(delta));

    const double step = lr_critic * delta;
    auto apply = [&](auto row) {
        if (phi.hot >= 0) {
            row(phi.hot) += step;
        } else if (scaled_lr_) {
            for (int i = 0; i < n_features_; ++i) row(i) += step * phi.dense[i] * inv_scale_[i];
        } else {
            for (int i = 0; i < n_features_; ++i) row(i) += step * phi.dense[i];
        }
    };
    if (variant_ == CriticVariant::qu_primary)
        apply(qu_weights[option].row(action));
    else
        apply(qomega_weights.row(option));
    return delta;
}

}  // namespace oc
