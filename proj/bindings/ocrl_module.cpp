#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "oc/agent.hpp"
#include "oc/baselines.hpp"
#include "oc/experiment.hpp"
#include "oc/fourrooms.hpp"
#include "oc/oracle.hpp"
#include "oc/pinball.hpp"

namespace py = pybind11;
using namespace py::literals;

namespace {

oc::TabularMDP mdp_from_arrays(const Eigen::MatrixXd& transition_flat,
                               const Eigen::MatrixXd& reward, double gamma,
                               const Eigen::VectorXd& start_dist,
                               const std::vector<int>& terminal) {
    const int S = static_cast<int>(reward.rows());
    const int A = static_cast<int>(reward.cols());
    if (transition_flat.rows() != S * A || transition_flat.cols() != S)
        throw std::invalid_argument("transition must be (S*A, S) with rows (s*A + a)");
    oc::TabularMDP mdp(S, A, gamma);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            mdp.r(s, a) = reward(s, a);
            for (int s2 = 0; s2 < S; ++s2) mdp.p(s, a, s2) = transition_flat(s * A + a, s2);
        }
    for (int s = 0; s < S; ++s) mdp.start_dist[s] = start_dist[s];
    for (int s : terminal) mdp.terminal.at(s) = 1;
    return mdp;
}

oc::FeatureVec featurize_any(const oc::FeatureMap& map, const py::object& x) {
    if (py::isinstance<py::int_>(x)) return map.featurize(x.cast<int>());
    const auto vec = x.cast<std::vector<double>>();
    return map.featurize(std::span<const double>(vec));
}

py::dict log_to_dict(const oc::EpisodeLog& log) {
    py::dict d;
    d["episode"] = log.episode;
    d["steps"] = log.steps;
    d["undiscounted_return"] = log.undiscounted_return;
    d["discounted_return"] = log.discounted_return;
    d["option_switches"] = log.option_switches;
    d["mean_option_duration"] = log.mean_option_duration;
    d["option_usage"] = log.option_usage;
    return d;
}

}  // namespace

PYBIND11_MODULE(ocrl, m) {
    m.doc() = "option-critic: intra-option policy and termination gradient learning";

    py::register_exception<oc::DivergenceError>(m, "DivergenceError");

    py::class_<oc::RngStream>(m, "RngStream")
        .def(py::init<std::uint64_t>(), "seed"_a)
        .def("substream", &oc::RngStream::substream, "index"_a)
        .def("uniform", &oc::RngStream::uniform)
        .def("uniform_int", &oc::RngStream::uniform_int, "n"_a);

    py::class_<oc::StepOutcome>(m, "StepOutcome")
        .def_readonly("next_state", &oc::StepOutcome::next_state)
        .def_readonly("reward", &oc::StepOutcome::reward)
        .def_readonly("done", &oc::StepOutcome::done);

    py::class_<oc::TabularMDP>(m, "TabularMDP")
        .def(py::init(&mdp_from_arrays), "transition"_a, "reward"_a, "gamma"_a, "start_dist"_a,
             "terminal"_a = std::vector<int>{})
        .def_static("from_text", [](const std::string& text) {
            std::istringstream in(text);
            return oc::load_mdp_text(in);
        })
        .def("to_text",
             [](const oc::TabularMDP& mdp) {
                 std::ostringstream out;
                 oc::save_mdp_text(mdp, out);
                 return out.str();
             })
        .def_readonly("n_states", &oc::TabularMDP::n_states)
        .def_readonly("n_actions", &oc::TabularMDP::n_actions)
        .def_readonly("discount", &oc::TabularMDP::discount)
        .def("p", py::overload_cast<int, int, int>(&oc::TabularMDP::p, py::const_), "s"_a, "a"_a,
             "s2"_a)
        .def("r", py::overload_cast<int, int>(&oc::TabularMDP::r, py::const_), "s"_a, "a"_a);

    m.def("validate", &oc::validate, "mdp"_a);
    m.def("step", &oc::step, "mdp"_a, "s"_a, "a"_a, "rng"_a);
    m.def("sample_start", &oc::sample_start, "mdp"_a, "rng"_a);

    py::class_<oc::FeatureMap>(m, "FeatureMap")
        .def_static("one_hot", &oc::FeatureMap::one_hot, "n_states"_a)
        .def_static("fourier", &oc::FeatureMap::fourier, "dim"_a, "order"_a)
        .def_property_readonly("n_features", &oc::FeatureMap::n_features)
        .def_property_readonly("coefficients", &oc::FeatureMap::coefficients)
        .def("lr_scaling", &oc::FeatureMap::lr_scaling)
        .def("featurize", [](const oc::FeatureMap& map, const py::object& x) {
            return map.to_dense(featurize_any(map, x));
        });

    py::class_<oc::IntraOptionPolicy>(m, "IntraOptionPolicy")
        .def(py::init<int, int, int, double>(), "n_options"_a, "n_actions"_a, "n_features"_a,
             "temperature"_a)
        .def_readwrite("temperature", &oc::IntraOptionPolicy::temperature)
        .def_property(
            "weights", [](const oc::IntraOptionPolicy& p) { return p.weights; },
            [](oc::IntraOptionPolicy& p, const std::vector<Eigen::MatrixXd>& w) {
                p.weights = w;
            })
        .def("action_probs",
             [](const oc::IntraOptionPolicy& p, const oc::FeatureMap& map, int option,
                const py::object& x) { return p.action_probs(option, featurize_any(map, x)); },
             "features"_a, "option"_a, "x"_a)
        .def("entropy",
             [](const oc::IntraOptionPolicy& p, const oc::FeatureMap& map, int option,
                const py::object& x) { return p.entropy(option, featurize_any(map, x)); },
             "features"_a, "option"_a, "x"_a);

    py::class_<oc::TerminationFunction>(m, "TerminationFunction")
        .def(py::init<int, int>(), "n_options"_a, "n_features"_a)
        .def_readwrite("weights", &oc::TerminationFunction::weights)
        .def("term_prob",
             [](const oc::TerminationFunction& tf, const oc::FeatureMap& map, int option,
                const py::object& x) { return tf.term_prob(option, featurize_any(map, x)); },
             "features"_a, "option"_a, "x"_a);

    py::class_<oc::PolicyOverOptions>(m, "PolicyOverOptions")
        .def(py::init([](double epsilon) { return oc::PolicyOverOptions{epsilon}; }),
             "epsilon"_a)
        .def_readwrite("epsilon", &oc::PolicyOverOptions::epsilon)
        .def("select", &oc::PolicyOverOptions::select, "q_row"_a, "rng"_a)
        .def("probs", &oc::PolicyOverOptions::probs, "q_row"_a);

    py::class_<oc::OptionModel>(m, "OptionModel")
        .def(py::init([](const oc::TabularMDP& mdp, const oc::IntraOptionPolicy& policy,
                         const oc::TerminationFunction& termination,
                         const Eigen::MatrixXd& pi_omega) {
                 return oc::OptionModel{mdp, oc::FeatureMap::one_hot(mdp.n_states), policy,
                                        termination, pi_omega};
             }),
             "mdp"_a, "policy"_a, "termination"_a, "pi_omega"_a)
        .def_readonly("pi_omega", &oc::OptionModel::pi_omega);

    py::class_<oc::AugmentedChain>(m, "AugmentedChain")
        .def_readonly("p1_same", &oc::AugmentedChain::p1_same)
        .def_readonly("p1_shifted", &oc::AugmentedChain::p1_shifted)
        .def("idx", &oc::AugmentedChain::idx, "s"_a, "option"_a);

    py::class_<oc::ExactValues>(m, "ExactValues")
        .def_readonly("q_omega", &oc::ExactValues::q_omega)
        .def_readonly("q_u", &oc::ExactValues::q_u)
        .def_readonly("u", &oc::ExactValues::u)
        .def_readonly("v_omega", &oc::ExactValues::v_omega)
        .def_readonly("rho", &oc::ExactValues::rho);

    py::enum_<oc::ChainConditioning>(m, "ChainConditioning")
        .value("same", oc::ChainConditioning::same)
        .value("shifted", oc::ChainConditioning::shifted);

    m.def("build_chain", &oc::build_chain, "model"_a);
    m.def("exact_values", &oc::exact_values, "model"_a);
    m.def("discounted_weighting", &oc::discounted_weighting, "chain"_a, "start_weights"_a,
          "conditioning"_a);
    m.def("start_pair_weights", &oc::start_pair_weights, "model"_a);
    m.def("intra_policy_gradient", &oc::intra_policy_gradient, "model"_a, "start_weights"_a);
    m.def("termination_gradient_exact", &oc::termination_gradient_exact, "model"_a, "s1"_a, "omega0"_a);
    m.def("fd_intra_policy_gradient", &oc::fd_intra_policy_gradient, "model"_a, "start_weights"_a,
          "h"_a = 1e-6);
    m.def("fd_termination_gradient", &oc::fd_termination_gradient, "model"_a, "s1"_a, "omega0"_a,
          "h"_a = 1e-6);
    m.def("intra_q_fixed_point", &oc::intra_q_fixed_point, "model"_a);

    py::class_<oc::VerifyReport>(m, "VerifyReport")
        .def_readonly("pass_", &oc::VerifyReport::pass)
        .def_readonly("worst_intra_grad", &oc::VerifyReport::worst_intra_grad)
        .def_readonly("worst_term_grad", &oc::VerifyReport::worst_term_grad)
        .def_readonly("worst_residual", &oc::VerifyReport::worst_residual)
        .def_readonly("worst_chain", &oc::VerifyReport::worst_chain)
        .def("__repr__", [](const oc::VerifyReport& r) {
            std::ostringstream os;
            oc::print_verify_report(r, os);
            return os.str();
        });

    m.def(
        "run_verify",
        [](int instances, std::uint64_t seed, int max_states, int max_actions, int max_options) {
            oc::VerifyOptions opts;
            opts.instances = instances;
            opts.seed = seed;
            opts.max_states = max_states;
            opts.max_actions = max_actions;
            opts.max_options = max_options;
            return oc::run_verify(opts);
        },
        "instances"_a = 20, "seed"_a = 7, "max_states"_a = 5, "max_actions"_a = 3,
        "max_options"_a = 3, py::call_guard<py::gil_scoped_release>());

    // experiment front end: a config-file-equivalent dict is overkill here;
    // train against the built-in environments with explicit arguments
    m.def(
        "train_fourrooms",
        [](int options, int episodes, std::uint64_t seed, double lr_critic, double lr_intra,
           double lr_term, double epsilon, double temperature, double gamma,
           int relocation_episode) {
            oc::FourRooms env(relocation_episode);
            oc::FeatureMap features = oc::FeatureMap::one_hot(env.n_states());
            oc::AgentConfig cfg;
            cfg.n_options = options;
            cfg.episodes = episodes;
            cfg.seed = seed;
            cfg.lr_critic = lr_critic;
            cfg.actor.lr_intra = lr_intra;
            cfg.actor.lr_term = lr_term;
            cfg.epsilon = epsilon;
            cfg.temperature = temperature;
            cfg.gamma = gamma;
            const oc::TrainResult result = oc::train(env, features, cfg);
            py::list logs;
            for (const auto& log : result.logs) logs.append(log_to_dict(log));
            return logs;
        },
        "options"_a = 4, "episodes"_a = 250, "seed"_a = 1, "lr_critic"_a = 0.5,
        "lr_intra"_a = 0.25, "lr_term"_a = 0.25, "epsilon"_a = 0.01, "temperature"_a = 0.001,
        "gamma"_a = 0.99, "relocation_episode"_a = 1000);

    m.def(
        "train_pinball",
        [](int options, int episodes, std::uint64_t seed, int fourier_order, double lr_critic,
           double lr_intra, double lr_term, double epsilon, double temperature, double gamma) {
            oc::Pinball env(oc::default_pinball_maze());
            oc::FeatureMap features = oc::FeatureMap::fourier(4, fourier_order);
            oc::AgentConfig cfg;
            cfg.n_options = options;
            cfg.episodes = episodes;
            cfg.seed = seed;
            cfg.lr_critic = lr_critic;
            cfg.actor.lr_intra = lr_intra;
            cfg.actor.lr_term = lr_term;
            cfg.epsilon = epsilon;
            cfg.temperature = temperature;
            cfg.gamma = gamma;
            cfg.init_scale = 1e-2;
            cfg.max_steps_per_episode = 10000;
            const oc::TrainResult result = oc::train(env, features, cfg);
            py::list logs;
            for (const auto& log : result.logs) logs.append(log_to_dict(log));
            return logs;
        },
        "options"_a = 4, "episodes"_a = 50, "seed"_a = 1, "fourier_order"_a = 3,
        "lr_critic"_a = 0.01, "lr_intra"_a = 0.001, "lr_term"_a = 0.001, "epsilon"_a = 0.01,
        "temperature"_a = 1.0, "gamma"_a = 0.99);
}
