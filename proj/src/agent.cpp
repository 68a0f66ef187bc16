#include "oc/agent.hpp"

namespace oc {

OptionAgent make_agent(const AgentConfig& cfg, const FeatureMap& features, int n_actions,
                       RngStream& rng) {
    OptionAgent agent{
        IntraOptionPolicy(cfg.n_options, n_actions, features.n_features(), cfg.temperature),
        TerminationFunction(cfg.n_options, features.n_features()),
        PolicyOverOptions{cfg.epsilon},
        CriticStore(cfg.critic_variant, cfg.n_options, n_actions, features.n_features(),
                    cfg.lr_critic)};
    if (cfg.init_scale > 0.0) {
        for (auto& w : agent.policy.weights)
            for (int a = 0; a < w.rows(); ++a)
                for (int f = 0; f < w.cols(); ++f)
                    w(a, f) = cfg.init_scale * (2.0 * rng.uniform() - 1.0);
        for (int o = 0; o < agent.termination.weights.rows(); ++o)
            for (int f = 0; f < agent.termination.weights.cols(); ++f)
                agent.termination.weights(o, f) = cfg.init_scale * (2.0 * rng.uniform() - 1.0);
    }
    if (cfg.fourier_lr_scaling && features.kind() == FeatureKind::fourier)
        agent.critic.set_lr_scaling(features.lr_scaling());
    return agent;
}

EpisodeLog run_episode(Env& env, OptionAgent& agent, const FeatureMap& features,
                       const AgentConfig& cfg, int episode_index, RngStream& rng) {
    EpisodeLog log;
    log.episode = episode_index;
    log.option_usage.assign(cfg.n_options, 0);

    FeatureVec phi = features.featurize(env.reset(rng));
    int option = agent.policy_over_options.select(
        agent.critic.q_omega_row(agent.policy, phi), rng);

    double gamma_t = 1.0;
    for (int t = 0; t < cfg.max_steps_per_episode; ++t) {
        const Eigen::VectorXd action_p = agent.policy.action_probs(option, phi);
        const int action = rng.categorical({action_p.data(), static_cast<std::size_t>(action_p.size())});
        const EnvStep out = env.step(action, rng);
        const FeatureVec next_phi = features.featurize(out.obs);

        // 1. options evaluation
        agent.critic.update(agent.policy, agent.termination, phi, option, action, out.reward,
                            next_phi, out.done, cfg.gamma);

        // 2. options improvement, with post-evaluation critic values
        const double q_u_sample =
            agent.critic.variant() == CriticVariant::qu_primary
                ? agent.critic.q_u(option, action, phi)
                : agent.critic.g1_target(agent.policy, agent.termination, out.reward, next_phi,
                                         option, out.done, cfg.gamma);
        const double baseline = cfg.actor.use_baseline
                                    ? agent.critic.q_omega(agent.policy, option, phi)
                                    : 0.0;
        intra_policy_step(agent.policy, cfg.actor, phi, option, action, q_u_sample, baseline);

        const ValueBundle next_values = agent.critic.values(
            agent.policy, next_phi, cfg.vomega_mode, agent.policy_over_options);
        termination_step(agent.termination, cfg.actor, next_phi, option,
                         next_values.advantage[option]);

        log.steps += 1;
        log.option_usage[option] += 1;
        log.undiscounted_return += out.reward;
        log.discounted_return += gamma_t * out.reward;
        gamma_t *= cfg.gamma;

        if (out.done) break;
        if (t + 1 >= cfg.max_steps_per_episode) break;  // truncated: no reselection follows

        phi = next_phi;
        // call-and-return: reselect only when the (updated) termination fires
        if (rng.bernoulli(agent.termination.term_prob(option, phi))) {
            log.option_switches += 1;
            option = agent.policy_over_options.select(
                agent.critic.q_omega_row(agent.policy, phi), rng);
        }
    }
    log.mean_option_duration =
        static_cast<double>(log.steps) / static_cast<double>(log.option_switches + 1);
    return log;
}

TrainResult train(Env& env, const FeatureMap& features, const AgentConfig& cfg) {
    RngStream rng(cfg.seed);
    OptionAgent agent = make_agent(cfg, features, env.n_actions(), rng);
    std::vector<EpisodeLog> logs;
    logs.reserve(cfg.episodes);
    for (int e = 0; e < cfg.episodes; ++e) {
        env.on_episode_start(e, rng);
        logs.push_back(run_episode(env, agent, features, cfg, e, rng));
    }
    return TrainResult{std::move(logs), std::move(agent)};
}

}  // namespace oc
