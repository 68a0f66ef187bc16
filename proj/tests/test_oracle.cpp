#include <doctest.h>

#include <cmath>

#include "oc/oracle.hpp"

using namespace oc;

namespace {

OptionModel make_model(TabularMDP mdp, int n_options, std::uint64_t seed, double tau = 1.0) {
    const int S = mdp.n_states, A = mdp.n_actions;
    OptionModel model{std::move(mdp), FeatureMap::one_hot(S),
                      IntraOptionPolicy(n_options, A, S, tau), TerminationFunction(n_options, S),
                      Eigen::MatrixXd::Constant(S, n_options, 1.0 / n_options)};
    RngStream rng(seed);
    for (auto& w : model.policy.weights)
        for (int a = 0; a < A; ++a)
            for (int f = 0; f < S; ++f) w(a, f) = 2.0 * rng.uniform() - 1.0;
    for (int w = 0; w < n_options; ++w)
        for (int f = 0; f < S; ++f)
            model.termination.weights(w, f) = 2.0 * rng.uniform() - 1.0;
    return model;
}

TabularMDP random_mdp(int S, int A, double gamma, std::uint64_t seed, int terminal = -1) {
    TabularMDP mdp(S, A, gamma);
    RngStream rng(seed);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            double sum = 0.0;
            for (int s2 = 0; s2 < S; ++s2) sum += mdp.p(s, a, s2) = rng.uniform() + 0.05;
            for (int s2 = 0; s2 < S; ++s2) mdp.p(s, a, s2) /= sum;
            mdp.r(s, a) = 2.0 * rng.uniform() - 1.0;
        }
    mdp.start_dist[0] = 1.0;
    if (terminal >= 0) mdp.terminal[terminal] = 1;
    return mdp;
}

}  // namespace

TEST_CASE("single-option chain collapses to the policy-induced state chain") {
    const OptionModel model = make_model(random_mdp(4, 2, 0.8, 1), 1, 2);
    const AugmentedChain chain = build_chain(model);
    for (int s = 0; s < 4; ++s) {
        const Eigen::VectorXd pi = model.action_probs(s, 0);
        for (int s2 = 0; s2 < 4; ++s2) {
            double p_pi = 0.0;
            for (int a = 0; a < 2; ++a) p_pi += pi[a] * model.mdp.p(s, a, s2);
            CHECK(chain.p1_same(chain.idx(s, 0), chain.idx(s2, 0)) ==
                  doctest::Approx(0.8 * p_pi).epsilon(1e-12));
        }
    }
}

TEST_CASE("always-terminating options reselect independently of the past") {
    OptionModel model = make_model(random_mdp(3, 2, 0.7, 3), 2, 4);
    model.termination.weights.setConstant(1e3);  // beta = 1
    model.pi_omega << 0.3, 0.7, 0.5, 0.5, 0.9, 0.1;
    const AugmentedChain chain = build_chain(model);
    for (int s = 0; s < 3; ++s)
        for (int w = 0; w < 2; ++w) {
            const Eigen::VectorXd pi = model.action_probs(s, w);
            for (int s2 = 0; s2 < 3; ++s2) {
                double p_pi = 0.0;
                for (int a = 0; a < 2; ++a) p_pi += pi[a] * model.mdp.p(s, a, s2);
                for (int w2 = 0; w2 < 2; ++w2)
                    CHECK(chain.p1_same(chain.idx(s, w), chain.idx(s2, w2)) ==
                          doctest::Approx(0.7 * p_pi * model.pi_omega(s2, w2)).epsilon(1e-12));
            }
        }
}

TEST_CASE("chain mass: non-terminal rows sum to gamma, terminal rows to zero") {
    const OptionModel model = make_model(random_mdp(5, 3, 0.85, 5, /*terminal=*/2), 3, 6);
    const AugmentedChain chain = build_chain(model);
    for (int s = 0; s < 5; ++s)
        for (int w = 0; w < 3; ++w) {
            const double expect = model.mdp.is_terminal(s) ? 0.0 : 0.85;
            CHECK(std::abs(chain.p1_same.row(chain.idx(s, w)).sum() - expect) <= 1e-12);
            CHECK(std::abs(chain.p1_shifted.row(chain.idx(s, w)).sum() - expect) <= 1e-12);
            CHECK(chain.p1_same.row(chain.idx(s, w)).minCoeff() >= 0.0);
            CHECK(chain.p1_shifted.row(chain.idx(s, w)).minCoeff() >= 0.0);
        }
}

TEST_CASE("exact values: zero rewards give zero everywhere") {
    TabularMDP mdp = random_mdp(4, 2, 0.9, 7);
    mdp.reward.assign(mdp.reward.size(), 0.0);
    const OptionModel model = make_model(std::move(mdp), 2, 8);
    const ExactValues ev = exact_values(model);
    CHECK(ev.q_omega.cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(ev.u.cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(ev.rho == doctest::Approx(0.0));

    const auto grad = intra_policy_gradient(model, start_pair_weights(model));
    for (const auto& g : grad) CHECK(g.cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("exact values: geometric series on a self-loop") {
    TabularMDP mdp(1, 1, 0.5);
    mdp.p(0, 0, 0) = 1.0;
    mdp.r(0, 0) = 1.0;
    mdp.start_dist[0] = 1.0;
    const OptionModel model = make_model(std::move(mdp), 1, 9);
    const ExactValues ev = exact_values(model);
    CHECK(ev.q_omega(0, 0) == doctest::Approx(2.0));
    CHECK(ev.rho == doctest::Approx(2.0));
}

TEST_CASE("exact values satisfy the evaluation equations") {
    const OptionModel model = make_model(random_mdp(5, 2, 0.9, 10, /*terminal=*/4), 2, 11);
    const ExactValues ev = exact_values(model);
    const TabularMDP& mdp = model.mdp;
    for (int s = 0; s < 5; ++s) {
        if (mdp.is_terminal(s)) {
            for (int w = 0; w < 2; ++w) CHECK(ev.q_omega(s, w) == 0.0);
            continue;
        }
        for (int w = 0; w < 2; ++w) {
            const Eigen::VectorXd pi = model.action_probs(s, w);
            double q = 0.0;
            for (int a = 0; a < 2; ++a) q += pi[a] * ev.q_u[w](s, a);
            CHECK(std::abs(q - ev.q_omega(s, w)) <= 1e-10);

            const double beta = model.beta(s, w);
            CHECK(std::abs(ev.u(w, s) -
                           ((1.0 - beta) * ev.q_omega(s, w) + beta * ev.v_omega[s])) <= 1e-12);
        }
        CHECK(std::abs(ev.v_omega[s] - model.pi_omega.row(s).dot(ev.q_omega.row(s))) <= 1e-12);
    }
}

TEST_CASE("discounted weighting basics") {
    const OptionModel model = make_model(random_mdp(4, 2, 0.9, 12), 2, 13);
    const AugmentedChain chain = build_chain(model);
    const Eigen::VectorXd start = pair_point_mass(chain, 1, 0);

    SUBCASE("gamma = 0 reduces to the start indicator") {
        OptionModel zero = model;
        zero.mdp.discount = 0.0;
        const AugmentedChain chain0 = build_chain(zero);
        const Eigen::VectorXd mu =
            discounted_weighting(chain0, pair_point_mass(chain0, 1, 0), ChainConditioning::same);
        for (int i = 0; i < mu.size(); ++i)
            CHECK(mu[i] == doctest::Approx(i == chain0.idx(1, 0) ? 1.0 : 0.0));
    }

    SUBCASE("entries are nonnegative with total mass at most 1/(1-gamma)") {
        for (const auto cond : {ChainConditioning::same, ChainConditioning::shifted}) {
            const Eigen::VectorXd mu = discounted_weighting(chain, start, cond);
            CHECK(mu.minCoeff() >= -1e-14);
            CHECK(mu.sum() <= 1.0 / (1.0 - 0.9) + 1e-9);
        }
    }

    SUBCASE("matches the truncated power series") {
        const int T = 200;
        const Eigen::VectorXd mu = discounted_weighting(chain, start, ChainConditioning::same);
        Eigen::VectorXd acc = start, term = start;
        for (int t = 1; t <= T; ++t) {
            term = chain.p1_same.transpose() * term;
            acc += term;
        }
        const double tail = std::pow(0.9, T + 1) / (1.0 - 0.9);
        CHECK((mu - acc).cwiseAbs().maxCoeff() <= tail + 1e-12);
    }
}

TEST_CASE("shifted weighting composed with one reselection equals the same-chain weighting") {
    const OptionModel model = make_model(random_mdp(4, 2, 0.85, 14, /*terminal=*/3), 2, 15);
    const AugmentedChain chain = build_chain(model);
    const Eigen::MatrixXd resel = reselection_matrix(model);
    const Eigen::VectorXd start = pair_point_mass(chain, 0, 1);

    const Eigen::VectorXd mu_shifted =
        discounted_weighting(chain, start, ChainConditioning::shifted);
    const Eigen::VectorXd composed = resel.transpose() * mu_shifted;
    const Eigen::VectorXd reselected_start = resel.transpose() * start;
    const Eigen::VectorXd mu_same =
        discounted_weighting(chain, reselected_start, ChainConditioning::same);
    CHECK((composed - mu_same).cwiseAbs().maxCoeff() <= 1e-10);

    // beta = 1: reselection is pure pi_omega, the case called out for options
    OptionModel always = model;
    always.termination.weights.setConstant(1e3);
    const AugmentedChain chain1 = build_chain(always);
    const Eigen::MatrixXd resel1 = reselection_matrix(always);
    const Eigen::VectorXd mu_shifted1 =
        discounted_weighting(chain1, start, ChainConditioning::shifted);
    const Eigen::VectorXd mu_same1 = discounted_weighting(
        chain1, Eigen::VectorXd(resel1.transpose() * start), ChainConditioning::same);
    CHECK((resel1.transpose() * mu_shifted1 - mu_same1).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("the intra-option policy gradient matches finite differences") {
    RngStream seeds(1001);
    for (int i = 0; i < 5; ++i) {
        const RandomInstance inst = random_instance(seeds.next_u64(), 5, 3, 3);
        const Eigen::VectorXd start = start_pair_weights(inst.model);
        const double rel = gradient_rel_error(intra_policy_gradient(inst.model, start),
                                              fd_intra_policy_gradient(inst.model, start));
        CHECK(rel <= 1e-5);
    }
}

TEST_CASE("policy-gradient support: gamma = 0 touches only the start state") {
    OptionModel model = make_model(random_mdp(4, 2, 0.9, 16), 2, 17);
    model.mdp.discount = 0.0;
    const AugmentedChain chain = build_chain(model);
    const auto grad = intra_policy_gradient(model, pair_point_mass(chain, 2, 1));
    CHECK(grad[0].cwiseAbs().maxCoeff() == 0.0);  // other option untouched
    for (int f = 0; f < 4; ++f)
        if (f != 2) CHECK(grad[1].col(f).cwiseAbs().maxCoeff() == 0.0);
    CHECK(grad[1].col(2).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("the termination gradient matches finite differences") {
    RngStream seeds(2002);
    for (int i = 0; i < 5; ++i) {
        const RandomInstance inst = random_instance(seeds.next_u64(), 5, 3, 3);
        const double rel = gradient_rel_error(
            termination_gradient_exact(inst.model, inst.start_state, inst.start_option),
            fd_termination_gradient(inst.model, inst.start_state, inst.start_option));
        CHECK(rel <= 1e-5);
    }
}

TEST_CASE("the termination gradient vanishes with a single option") {
    const OptionModel model = make_model(random_mdp(4, 2, 0.9, 18), 1, 19);
    const Eigen::MatrixXd grad = termination_gradient_exact(model, 0, 0);
    CHECK(grad.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("a strictly dominated option's termination logits all rise under ascent") {
    // option 1 always picks the zero-reward action; option 0 the rewarding one
    TabularMDP mdp(2, 2, 0.9);
    for (int s = 0; s < 2; ++s) {
        mdp.p(s, 0, 1 - s) = 1.0;
        mdp.p(s, 1, s) = 1.0;
        mdp.r(s, 0) = 1.0;
    }
    mdp.start_dist[0] = 1.0;
    OptionModel model = make_model(std::move(mdp), 2, 20, /*tau=*/0.05);
    model.policy.weights[0].setZero();
    model.policy.weights[1].setZero();
    model.policy.weights[0].row(0).setConstant(1.0);  // option 0 -> action 0
    model.policy.weights[1].row(1).setConstant(1.0);  // option 1 -> action 1
    model.pi_omega.setZero();
    model.pi_omega.col(0).setConstant(0.95);  // selection favors option 0
    model.pi_omega.col(1).setConstant(0.05);

    const ExactValues ev = exact_values(model);
    for (int s = 0; s < 2; ++s) CHECK(ev.q_omega(s, 1) < ev.v_omega[s]);

    const Eigen::MatrixXd grad = termination_gradient_exact(model, 0, 1);
    // ascent on U raises every termination logit of the dominated option
    for (int f = 0; f < 2; ++f) CHECK(grad(1, f) > 0.0);
}

TEST_CASE("fixed point with forced termination is option-independent") {
    OptionModel model = make_model(random_mdp(3, 2, 0.8, 21), 2, 22);
    model.termination.weights.setConstant(1e3);
    // with beta = 1 the bootstrap ignores the executing option entirely
    model.policy.weights[1] = model.policy.weights[0];
    const auto qu = intra_q_fixed_point(model);
    CHECK((qu[0] - qu[1]).cwiseAbs().maxCoeff() <= 1e-11);
}

TEST_CASE("fixed point of zero rewards is zero") {
    TabularMDP mdp = random_mdp(3, 2, 0.8, 23);
    mdp.reward.assign(mdp.reward.size(), 0.0);
    const OptionModel model = make_model(std::move(mdp), 2, 24);
    for (const auto& q : intra_q_fixed_point(model)) CHECK(q.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("greedy-materialized exact solve agrees with the fixed point") {
    const RandomInstance inst = random_instance(2525, 5, 3, 3);
    const OptionModel& model = inst.model;
    const auto qu = intra_q_fixed_point(model);
    Eigen::MatrixXd q_omega(model.mdp.n_states, model.n_options());
    for (int s = 0; s < model.mdp.n_states; ++s)
        for (int w = 0; w < model.n_options(); ++w)
            q_omega(s, w) =
                model.mdp.is_terminal(s) ? 0.0 : model.action_probs(s, w).dot(qu[w].row(s));
    OptionModel greedy = model;
    greedy.pi_omega = epsilon_greedy_probs(q_omega, 0.0);
    CHECK((exact_values(greedy).q_omega - q_omega).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("the full verify battery passes and the corrupt hook fails it") {
    VerifyOptions opts;
    opts.instances = 20;
    const VerifyReport report = run_verify(opts);
    CHECK(report.pass);
    CHECK(report.worst_intra_grad <= 1e-5);
    CHECK(report.worst_term_grad <= 1e-5);
    CHECK(report.worst_chain <= 1e-12);
    CHECK(report.worst_residual <= 1e-10);
    CHECK(report.worst_fixpoint <= 1e-9);

    opts.instances = 2;
    opts.corrupt_gradient = true;
    const VerifyReport corrupted = run_verify(opts);
    CHECK(!corrupted.pass);
    CHECK(corrupted.failing_index == 0);
    CHECK(corrupted.failing_mdp_text.find("mdp ") == 0);

    // identical options reproduce an identical report
    opts.corrupt_gradient = false;
    opts.instances = 5;
    const VerifyReport r1 = run_verify(opts);
    const VerifyReport r2 = run_verify(opts);
    REQUIRE(r1.instances.size() == r2.instances.size());
    for (std::size_t i = 0; i < r1.instances.size(); ++i) {
        CHECK(r1.instances[i].intra_grad_rel == r2.instances[i].intra_grad_rel);
        CHECK(r1.instances[i].term_grad_rel == r2.instances[i].term_grad_rel);
        CHECK(r1.instances[i].seed == r2.instances[i].seed);
    }
}

TEST_CASE("oracle problem size is capped") {
    TabularMDP mdp(600, 1, 0.9);
    for (int s = 0; s < 600; ++s) mdp.p(s, 0, s) = 1.0;
    mdp.start_dist[0] = 1.0;
    const OptionModel model{std::move(mdp), FeatureMap::one_hot(600),
                            IntraOptionPolicy(4, 1, 600, 1.0), TerminationFunction(4, 600),
                            Eigen::MatrixXd::Constant(600, 4, 0.25)};
    CHECK_THROWS_AS(build_chain(model), std::invalid_argument);
}
