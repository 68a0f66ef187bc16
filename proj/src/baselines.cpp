#include "oc/baselines.hpp"

#include <cmath>

namespace oc {

namespace {

Eigen::VectorXd boltzmann(const Eigen::MatrixXd& w, const FeatureVec& phi, double tau) {
    Eigen::VectorXd z(w.rows());
    for (int a = 0; a < w.rows(); ++a) z[a] = dot(w.row(a), phi) / tau;
    z.array() -= z.maxCoeff();
    Eigen::VectorXd p = z.array().exp();
    p /= p.sum();
    return p;
}

int sample(const Eigen::VectorXd& p, RngStream& rng) {
    return rng.categorical({p.data(), static_cast<std::size_t>(p.size())});
}

EpisodeLog flat_log(int episode, int steps, double undiscounted, double discounted) {
    EpisodeLog log;
    log.episode = episode;
    log.steps = steps;
    log.undiscounted_return = undiscounted;
    log.discounted_return = discounted;
    log.option_switches = 0;
    log.mean_option_duration = steps;
    return log;
}

}  // namespace

BaselineResult train_sarsa(Env& env, const FeatureMap& features, const AgentConfig& cfg) {
    RngStream rng(cfg.seed);
    SarsaAgent agent{Eigen::MatrixXd::Zero(env.n_actions(), features.n_features()),
                     cfg.temperature};
    BaselineResult result;
    result.logs.reserve(cfg.episodes);

    for (int e = 0; e < cfg.episodes; ++e) {
        env.on_episode_start(e, rng);
        FeatureVec phi = features.featurize(env.reset(rng));
        int action = sample(boltzmann(agent.q, phi, agent.temperature), rng);
        int steps = 0;
        double ret = 0.0, dret = 0.0, gamma_t = 1.0;
        for (int t = 0; t < cfg.max_steps_per_episode; ++t) {
            const EnvStep out = env.step(action, rng);
            const FeatureVec next_phi = features.featurize(out.obs);
            double target = out.reward;
            int next_action = -1;
            if (!out.done) {
                next_action = sample(boltzmann(agent.q, next_phi, agent.temperature), rng);
                target += cfg.gamma * dot(agent.q.row(next_action), next_phi);
            }
            const double delta = target - dot(agent.q.row(action), phi);
            if (!std::isfinite(delta) || std::abs(delta) > 1e8)
                throw DivergenceError("sarsa diverged: delta = " + format_double(delta));
            axpy(cfg.lr_critic * delta, phi, agent.q.row(action));

            ++steps;
            ret += out.reward;
            dret += gamma_t * out.reward;
            gamma_t *= cfg.gamma;
            if (out.done) break;
            phi = next_phi;
            action = next_action;
        }
        result.logs.push_back(flat_log(e, steps, ret, dret));
    }
    result.q_or_policy = std::move(agent.q);
    return result;
}

BaselineResult train_actor_critic(Env& env, const FeatureMap& features, const AgentConfig& cfg) {
    RngStream rng(cfg.seed);
    ActorCriticAgent agent{Eigen::MatrixXd::Zero(env.n_actions(), features.n_features()),
                           Eigen::VectorXd::Zero(features.n_features()), cfg.temperature};
    BaselineResult result;
    result.logs.reserve(cfg.episodes);

    for (int e = 0; e < cfg.episodes; ++e) {
        env.on_episode_start(e, rng);
        FeatureVec phi = features.featurize(env.reset(rng));
        int steps = 0;
        double ret = 0.0, dret = 0.0, gamma_t = 1.0;
        for (int t = 0; t < cfg.max_steps_per_episode; ++t) {
            const Eigen::VectorXd p = boltzmann(agent.policy_weights, phi, agent.temperature);
            const int action = sample(p, rng);
            const EnvStep out = env.step(action, rng);
            const FeatureVec next_phi = features.featurize(out.obs);

            double target = out.reward;
            if (!out.done) target += cfg.gamma * dot(agent.value_weights, next_phi);
            const double delta = target - dot(agent.value_weights, phi);
            if (!std::isfinite(delta) || std::abs(delta) > 1e8)
                throw DivergenceError("actor-critic diverged: delta = " + format_double(delta));
            axpy(cfg.lr_critic * delta, phi, agent.value_weights);

            if (cfg.actor.lr_intra != 0.0) {
                Eigen::VectorXd coef = -p * delta;
                coef[action] += delta;
                coef *= cfg.actor.lr_intra / agent.temperature;
                if (phi.hot >= 0)
                    agent.policy_weights.col(phi.hot) += coef;
                else
                    agent.policy_weights.noalias() += coef * phi.dense.transpose();
            }

            ++steps;
            ret += out.reward;
            dret += gamma_t * out.reward;
            gamma_t *= cfg.gamma;
            if (out.done) break;
            phi = next_phi;
        }
        result.logs.push_back(flat_log(e, steps, ret, dret));
    }
    result.q_or_policy = std::move(agent.policy_weights);
    result.value = std::move(agent.value_weights);
    return result;
}

}  // namespace oc
