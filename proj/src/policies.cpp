#include "oc/policies.hpp"

#include <cmath>
#include <stdexcept>

namespace oc {

int argmax_lowest(const Eigen::Ref<const Eigen::VectorXd>& v) {
    int best = 0;
    for (int i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

IntraOptionPolicy::IntraOptionPolicy(int n_options, int n_actions, int n_features,
                                     double temperature)
    : weights(n_options, Eigen::MatrixXd::Zero(n_actions, n_features)),
      temperature(temperature),
      n_actions_(n_actions),
      n_features_(n_features) {
    if (temperature <= 0.0) throw std::invalid_argument("temperature must be positive");
}

Eigen::VectorXd IntraOptionPolicy::logits(int option, const FeatureVec& phi) const {
    const Eigen::MatrixXd& w = weights[option];
    if (phi.hot >= 0) return w.col(phi.hot) / temperature;
    return (w * phi.dense) / temperature;
}

Eigen::VectorXd IntraOptionPolicy::action_probs(int option, const FeatureVec& phi) const {
    Eigen::VectorXd z = logits(option, phi);
    z.array() -= z.maxCoeff();
    Eigen::VectorXd p = z.array().exp();
    p /= p.sum();
    return p;
}

Eigen::MatrixXd IntraOptionPolicy::logpi_grad(int option, const FeatureVec& phi,
                                              int action) const {
    Eigen::VectorXd coef = -action_probs(option, phi);
    coef[action] += 1.0;
    coef /= temperature;
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n_actions_, n_features_);
    if (phi.hot >= 0)
        g.col(phi.hot) = coef;
    else
        g.noalias() = coef * phi.dense.transpose();
    return g;
}

double IntraOptionPolicy::entropy(int option, const FeatureVec& phi) const {
    const Eigen::VectorXd p = action_probs(option, phi);
    double h = 0.0;
    for (int a = 0; a < p.size(); ++a)
        if (p[a] > 0.0) h -= p[a] * std::log(p[a]);
    return h;
}

Eigen::MatrixXd IntraOptionPolicy::entropy_grad(int option, const FeatureVec& phi) const {
    const Eigen::VectorXd p = action_probs(option, phi);
    double h = 0.0;
    for (int a = 0; a < p.size(); ++a)
        if (p[a] > 0.0) h -= p[a] * std::log(p[a]);
    Eigen::VectorXd coef(p.size());
    for (int a = 0; a < p.size(); ++a)
        coef[a] = -(p[a] * (std::log(p[a]) + h)) / temperature;
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n_actions_, n_features_);
    if (phi.hot >= 0)
        g.col(phi.hot) = coef;
    else
        g.noalias() = coef * phi.dense.transpose();
    return g;
}

TerminationFunction::TerminationFunction(int n_options, int n_features)
    : weights(Eigen::MatrixXd::Zero(n_options, n_features)) {}

double TerminationFunction::term_prob(int option, const FeatureVec& phi) const {
    return sigmoid(dot(weights.row(option), phi));
}

Eigen::VectorXd TerminationFunction::beta_grad(int option, const FeatureVec& phi) const {
    const double b = term_prob(option, phi);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(weights.cols());
    axpy(b * (1.0 - b), phi, g);
    return g;
}

int PolicyOverOptions::select(const Eigen::Ref<const Eigen::VectorXd>& q_row,
                              RngStream& rng) const {
    if (q_row.size() < 1) throw std::invalid_argument("select: empty option set");
    if (rng.uniform() < epsilon) return rng.uniform_int(static_cast<int>(q_row.size()));
    return argmax_lowest(q_row);
}

Eigen::VectorXd PolicyOverOptions::probs(const Eigen::Ref<const Eigen::VectorXd>& q_row) const {
    const int n = static_cast<int>(q_row.size());
    Eigen::VectorXd p = Eigen::VectorXd::Constant(n, epsilon / n);
    p[argmax_lowest(q_row)] += 1.0 - epsilon;
    return p;
}

}  // namespace oc
