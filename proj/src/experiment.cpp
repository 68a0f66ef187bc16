#include "oc/experiment.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "oc/baselines.hpp"
#include "oc/fourrooms.hpp"
#include "oc/pinball.hpp"

namespace oc {

namespace fs = std::filesystem;

EnvBundle make_env(const RunConfig& cfg) {
    EnvBundle bundle;
    if (cfg.env == "fourrooms") {
        auto env = std::make_unique<FourRooms>(cfg.relocation_episode);
        bundle.features = FeatureMap::one_hot(env->n_states());
        bundle.max_steps = 50000;
        bundle.env = std::move(env);
    } else if (cfg.env == "pinball") {
        PinballConfig pc =
            cfg.pinball_maze.empty() ? default_pinball_maze() : load_pinball_file(cfg.pinball_maze);
        pc.substeps = cfg.pinball_substeps;
        pc.thrust = cfg.pinball_thrust;
        pc.drag = cfg.pinball_drag;
        bundle.env = std::make_unique<Pinball>(std::move(pc));
        bundle.features = FeatureMap::fourier(4, cfg.fourier_order);
        bundle.max_steps = 10000;
    } else if (cfg.env == "mdp-file") {
        TabularMDP mdp = load_mdp_file(cfg.mdp_file);
        const auto violations = validate(mdp);
        if (!violations.empty()) throw ConfigError(0, "invalid mdp: " + violations.front());
        auto env = std::make_unique<TabularEnv>(std::move(mdp));
        bundle.features = FeatureMap::one_hot(env->n_states());
        bundle.max_steps = 50000;
        bundle.env = std::move(env);
    } else {
        throw ConfigError(0, "unknown env '" + cfg.env + "'");
    }
    if (cfg.max_steps_override > 0) bundle.max_steps = cfg.max_steps_override;
    return bundle;
}

Checkpoint agent_checkpoint(const RunConfig& cfg, const OptionAgent& agent,
                            const FeatureMap& features) {
    Checkpoint ckpt;
    ckpt.env = cfg.env;
    ckpt.agent = "oc";
    ckpt.n_options = agent.policy.n_options();
    ckpt.feature_kind = features.kind() == FeatureKind::fourier ? "fourier" : "one-hot";
    ckpt.input_dim = features.input_dim();
    ckpt.order = features.kind() == FeatureKind::fourier ? features.order() : 0;
    ckpt.n_actions = agent.policy.n_actions();
    ckpt.critic_variant =
        agent.critic.variant() == CriticVariant::qu_primary ? "qu" : "qomega";
    ckpt.vomega = cfg.agent_cfg.vomega_mode == VOmegaMode::greedy ? "greedy" : "soft";
    ckpt.fourier_scaling = cfg.agent_cfg.fourier_lr_scaling;
    ckpt.tau = agent.policy.temperature;
    ckpt.epsilon = agent.policy_over_options.epsilon;
    ckpt.gamma = cfg.agent_cfg.gamma;
    ckpt.put("intra", agent.policy.weights);
    ckpt.put("term", agent.termination.weights);
    if (agent.critic.variant() == CriticVariant::qu_primary)
        ckpt.put("critic_qu", agent.critic.qu_weights);
    else
        ckpt.put("critic_qomega", agent.critic.qomega_weights);
    return ckpt;
}

void restore_agent(const Checkpoint& ckpt, const RunConfig& cfg, OptionAgent& agent) {
    if (ckpt.agent != "oc") throw ConfigError(0, "checkpoint agent '" + ckpt.agent + "' is not oc");
    if (ckpt.env != cfg.env)
        throw ConfigError(0, "checkpoint env '" + ckpt.env + "' does not match config env '" +
                                 cfg.env + "'");
    if (ckpt.n_options != agent.policy.n_options())
        throw ConfigError(0, "checkpoint has " + std::to_string(ckpt.n_options) +
                                 " options, config expects " +
                                 std::to_string(agent.policy.n_options()));
    if (ckpt.n_actions != agent.policy.n_actions())
        throw ConfigError(0, "checkpoint action count mismatch");

    const auto intra = ckpt.get_tensor("intra");
    if (static_cast<int>(intra.size()) != agent.policy.n_options() ||
        intra[0].rows() != agent.policy.n_actions() ||
        intra[0].cols() != agent.policy.n_features())
        throw ConfigError(0, "checkpoint intra-option weight dims mismatch");
    agent.policy.weights = intra;

    const auto term = ckpt.get_matrix("term");
    if (term.rows() != agent.termination.weights.rows() ||
        term.cols() != agent.termination.weights.cols())
        throw ConfigError(0, "checkpoint termination weight dims mismatch");
    agent.termination.weights = term;

    if (agent.critic.variant() == CriticVariant::qu_primary) {
        const auto qu = ckpt.get_tensor("critic_qu");
        if (static_cast<int>(qu.size()) != agent.critic.n_options() ||
            qu[0].rows() != agent.critic.n_actions() || qu[0].cols() != agent.critic.n_features())
            throw ConfigError(0, "checkpoint critic dims mismatch");
        agent.critic.qu_weights = qu;
    } else {
        const auto qo = ckpt.get_matrix("critic_qomega");
        if (qo.rows() != agent.critic.n_options() || qo.cols() != agent.critic.n_features())
            throw ConfigError(0, "checkpoint critic dims mismatch");
        agent.critic.qomega_weights = qo;
    }
}

SingleRun execute_run(const RunConfig& cfg, int run_index) {
    EnvBundle bundle = make_env(cfg);
    AgentConfig acfg = cfg.agent_cfg;
    acfg.seed = cfg.base_seed + static_cast<std::uint64_t>(run_index);
    acfg.max_steps_per_episode = bundle.max_steps;

    SingleRun run;
    if (cfg.agent == "sarsa" || cfg.agent == "ac") {
        BaselineResult res = cfg.agent == "sarsa"
                                 ? train_sarsa(*bundle.env, bundle.features, acfg)
                                 : train_actor_critic(*bundle.env, bundle.features, acfg);
        run.logs = std::move(res.logs);
        Checkpoint ckpt;
        ckpt.env = cfg.env;
        ckpt.agent = cfg.agent;
        ckpt.n_options = 0;
        ckpt.feature_kind =
            bundle.features.kind() == FeatureKind::fourier ? "fourier" : "one-hot";
        ckpt.input_dim = bundle.features.input_dim();
        ckpt.order = bundle.features.kind() == FeatureKind::fourier ? bundle.features.order() : 0;
        ckpt.n_actions = bundle.env->n_actions();
        ckpt.critic_variant = "none";
        ckpt.tau = acfg.temperature;
        ckpt.epsilon = acfg.epsilon;
        ckpt.gamma = acfg.gamma;
        ckpt.put(cfg.agent == "sarsa" ? "q" : "policy", res.q_or_policy);
        if (cfg.agent == "ac") {
            Eigen::MatrixXd v = res.value.transpose();
            ckpt.put("value", v);
        }
        run.final_state = std::move(ckpt);
        return run;
    }

    RngStream rng(acfg.seed);
    OptionAgent agent = make_agent(acfg, bundle.features, bundle.env->n_actions(), rng);
    run.logs.reserve(acfg.episodes);
    for (int e = 0; e < acfg.episodes; ++e) {
        bundle.env->on_episode_start(e, rng);
        run.logs.push_back(run_episode(*bundle.env, agent, bundle.features, acfg, e, rng));
        if (cfg.checkpoint_every > 0 && (e + 1) % cfg.checkpoint_every == 0)
            run.snapshots.emplace_back(e + 1, agent_checkpoint(cfg, agent, bundle.features));
    }
    run.final_state = agent_checkpoint(cfg, agent, bundle.features);
    return run;
}

std::vector<SingleRun> execute_all(const RunConfig& cfg, int jobs) {
    std::vector<SingleRun> runs(cfg.runs);
    std::vector<std::string> errors(cfg.runs);
    std::atomic<int> next{0};
    const int workers = std::max(1, std::min(jobs, cfg.runs));

    auto work = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= cfg.runs) return;
            try {
                runs[i] = execute_run(cfg, i);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (int i = 0; i < cfg.runs; ++i)
        if (!errors[i].empty())
            throw DivergenceError("run " + std::to_string(i) + ": " + errors[i]);
    return runs;
}

void write_run_csv(const std::vector<EpisodeLog>& logs, std::ostream& out) {
    out << "episode,steps,undiscounted_return,discounted_return,option_switches,"
           "mean_option_duration\n";
    for (const auto& log : logs)
        out << log.episode << "," << log.steps << "," << format_double(log.undiscounted_return)
            << "," << format_double(log.discounted_return) << "," << log.option_switches << ","
            << format_double(log.mean_option_duration) << "\n";
}

void write_mean_csv(const std::vector<SingleRun>& runs, std::ostream& out) {
    out << "episode,steps,undiscounted_return,discounted_return,option_switches,"
           "mean_option_duration\n";
    if (runs.empty()) return;
    const std::size_t episodes = runs.front().logs.size();
    const double n = static_cast<double>(runs.size());
    for (std::size_t e = 0; e < episodes; ++e) {
        double steps = 0, ret = 0, dret = 0, switches = 0, dur = 0;
        for (const auto& run : runs) {
            const EpisodeLog& log = run.logs[e];
            steps += log.steps;
            ret += log.undiscounted_return;
            dret += log.discounted_return;
            switches += log.option_switches;
            dur += log.mean_option_duration;
        }
        out << e << "," << format_double(steps / n) << "," << format_double(ret / n) << ","
            << format_double(dret / n) << "," << format_double(switches / n) << ","
            << format_double(dur / n) << "\n";
    }
}

void write_heatmap_csv(const Checkpoint& ckpt, std::ostream& out) {
    if (ckpt.env != "fourrooms")
        throw ConfigError(0, "heatmap requires a fourrooms checkpoint, got env '" + ckpt.env +
                                 "'");
    if (!ckpt.arrays.count("term"))
        throw ConfigError(0, "checkpoint has no termination parameters");
    const Eigen::MatrixXd term = ckpt.get_matrix("term");
    FourRooms rooms;
    if (term.cols() != rooms.n_states())
        throw ConfigError(0, "checkpoint termination weights do not match the fourrooms map");

    out << "option,row,col,beta\n";
    for (int w = 0; w < term.rows(); ++w)
        for (int r = 0; r < FourRooms::kRows; ++r)
            for (int c = 0; c < FourRooms::kCols; ++c) {
                const int s = rooms.state_of_cell(r, c);
                const double beta = s < 0 ? -1.0 : sigmoid(term(w, s));
                out << w << "," << r << "," << c << "," << format_double(beta) << "\n";
            }
}

namespace {

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    body(out);
}

int run_and_dump(const RunConfig& cfg, int jobs, const std::string& csv_prefix,
                 bool save_checkpoints, std::ostream& out, std::ostream& err) {
    try {
        const fs::path dir(cfg.output_dir);
        fs::create_directories(dir);
        const std::vector<SingleRun> runs = execute_all(cfg, jobs);
        for (int k = 0; k < cfg.runs; ++k) {
            write_file(dir / (csv_prefix + "run_" + std::to_string(k) + ".csv"),
                       [&](std::ostream& o) { write_run_csv(runs[k].logs, o); });
            if (save_checkpoints) {
                save_checkpoint_file(runs[k].final_state,
                                     (dir / ("run_" + std::to_string(k) + ".ckpt")).string());
                for (const auto& [episode, snap] : runs[k].snapshots)
                    save_checkpoint_file(snap, (dir / ("run_" + std::to_string(k) + "_ep" +
                                                       std::to_string(episode) + ".ckpt"))
                                                   .string());
            }
        }
        write_file(dir / (csv_prefix + "mean.csv"),
                   [&](std::ostream& o) { write_mean_csv(runs, o); });
        out << csv_prefix << "wrote " << cfg.runs << " run(s) to " << dir.string() << "\n";
        return 0;
    } catch (const DivergenceError& e) {
        err << "training aborted: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace

int cmd_train(const RunConfig& cfg, int jobs, std::ostream& out, std::ostream& err) {
    return run_and_dump(cfg, jobs, "", /*save_checkpoints=*/true, out, err);
}

int cmd_eval(const RunConfig& cfg, const std::string& checkpoint_path, int jobs,
             std::ostream& out, std::ostream& err) {
    (void)jobs;  // evaluation runs are cheap; keep them sequential
    const Checkpoint ckpt = load_checkpoint_file(checkpoint_path);
    RunConfig eval_cfg = cfg;
    eval_cfg.checkpoint_every = 0;

    // validate dimensions once up front
    {
        EnvBundle bundle = make_env(eval_cfg);
        RngStream rng(eval_cfg.base_seed);
        OptionAgent probe =
            make_agent(eval_cfg.agent_cfg, bundle.features, bundle.env->n_actions(), rng);
        restore_agent(ckpt, eval_cfg, probe);
    }

    try {
        const fs::path dir(eval_cfg.output_dir);
        fs::create_directories(dir);
        std::vector<SingleRun> runs(eval_cfg.runs);
        for (int k = 0; k < eval_cfg.runs; ++k) {
            EnvBundle bundle = make_env(eval_cfg);
            AgentConfig acfg = eval_cfg.agent_cfg;
            acfg.seed = eval_cfg.base_seed + static_cast<std::uint64_t>(k);
            acfg.max_steps_per_episode = bundle.max_steps;
            acfg.lr_critic = 0.0;
            acfg.actor.lr_intra = 0.0;
            acfg.actor.lr_term = 0.0;
            RngStream rng(acfg.seed);
            OptionAgent agent =
                make_agent(acfg, bundle.features, bundle.env->n_actions(), rng);
            restore_agent(ckpt, eval_cfg, agent);
            agent.critic.lr_critic = 0.0;
            for (int e = 0; e < acfg.episodes; ++e) {
                bundle.env->on_episode_start(e, rng);
                runs[k].logs.push_back(
                    run_episode(*bundle.env, agent, bundle.features, acfg, e, rng));
            }
        }
        for (int k = 0; k < eval_cfg.runs; ++k)
            write_file(dir / ("eval_run_" + std::to_string(k) + ".csv"),
                       [&](std::ostream& o) { write_run_csv(runs[k].logs, o); });
        write_file(dir / "eval_mean.csv",
                   [&](std::ostream& o) { write_mean_csv(runs, o); });
        out << "evaluated " << eval_cfg.runs << " run(s) to " << dir.string() << "\n";
        return 0;
    } catch (const DivergenceError& e) {
        err << "evaluation aborted: " << e.what() << "\n";
        return 3;
    }
}

void print_verify_report(const VerifyReport& report, std::ostream& out) {
    for (const auto& st : report.instances) {
        std::ostringstream line;
        line << "instance " << st.index << " |S|=" << st.n_states << " |A|=" << st.n_actions
             << " |O|=" << st.n_options << " seed=" << st.seed
             << ": chain=" << format_double(st.chain_row_err)
             << " factor=" << format_double(st.factor_err)
             << " resid=" << format_double(st.residual)
             << " thm1=" << format_double(st.intra_grad_rel)
             << " thm2=" << format_double(st.term_grad_rel)
             << " fixpt=" << format_double(st.fixpoint_err)
             << " mu=" << format_double(st.mu_series_err) << " "
             << (st.pass ? "PASS" : "FAIL");
        out << line.str() << "\n";
    }
    out << "worst: chain=" << format_double(report.worst_chain)
        << " factor=" << format_double(report.worst_factor)
        << " resid=" << format_double(report.worst_residual)
        << " thm1=" << format_double(report.worst_intra_grad)
        << " thm2=" << format_double(report.worst_term_grad)
        << " fixpt=" << format_double(report.worst_fixpoint)
        << " mu=" << format_double(report.worst_mu) << "\n";
    out << (report.pass ? "VERIFY PASS" : "VERIFY FAIL") << " (" << report.instances.size()
        << " instances)\n";
}

}  // namespace oc
