#include "oc/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

namespace oc {

namespace {

constexpr int kMaxPairs = 2000;  // dense-solve size cap

void check_size(const OptionModel& model) {
    if (model.mdp.n_states * model.n_options() > kMaxPairs)
        throw std::invalid_argument("oracle problem exceeds |S||Omega| <= 2000");
}

}  // namespace

AugmentedChain build_chain(const OptionModel& model) {
    check_size(model);
    const TabularMDP& mdp = model.mdp;
    const int S = mdp.n_states, W = model.n_options();
    const double gamma = mdp.discount;

    AugmentedChain chain;
    chain.n_states = S;
    chain.n_options = W;
    chain.p1_same = Eigen::MatrixXd::Zero(S * W, S * W);
    chain.p1_shifted = Eigen::MatrixXd::Zero(S * W, S * W);

    // cache per-state quantities
    std::vector<Eigen::VectorXd> pi(S * W);   // action probs per (s, w)
    Eigen::MatrixXd beta(S, W);
    for (int s = 0; s < S; ++s)
        for (int w = 0; w < W; ++w) {
            pi[chain.idx(s, w)] = model.action_probs(s, w);
            beta(s, w) = model.beta(s, w);
        }

    for (int s = 0; s < S; ++s) {
        if (mdp.is_terminal(s)) continue;  // episode ends on entry; no outgoing mass
        for (int w = 0; w < W; ++w) {
            const int row = chain.idx(s, w);
            // P(s'|s) under the intra-option policy of w
            Eigen::VectorXd p_next = Eigen::VectorXd::Zero(S);
            for (int a = 0; a < mdp.n_actions; ++a) {
                const double pa = pi[row][a];
                if (pa == 0.0) continue;
                for (int s2 = 0; s2 < S; ++s2) p_next[s2] += pa * mdp.p(s, a, s2);
            }
            // same conditioning: arrive at s', then keep w or reselect there
            for (int s2 = 0; s2 < S; ++s2) {
                const double base = gamma * p_next[s2];
                if (base == 0.0) continue;
                const double b = beta(s2, w);
                for (int w2 = 0; w2 < W; ++w2) {
                    double m = b * model.pi_omega(s2, w2);
                    if (w2 == w) m += 1.0 - b;
                    chain.p1_same(row, chain.idx(s2, w2)) += base * m;
                }
            }
            // shifted conditioning: reselect at s first, then move under the
            // new option; row option is the incoming omega_{t-1}
            const double b_here = beta(s, w);
            for (int w2 = 0; w2 < W; ++w2) {
                double m = b_here * model.pi_omega(s, w2);
                if (w2 == w) m += 1.0 - b_here;
                if (m == 0.0) continue;
                const Eigen::VectorXd& pi2 = pi[chain.idx(s, w2)];
                for (int a = 0; a < mdp.n_actions; ++a) {
                    const double pa = pi2[a];
                    if (pa == 0.0) continue;
                    for (int s2 = 0; s2 < S; ++s2) {
                        const double v = gamma * m * pa * mdp.p(s, a, s2);
                        if (v != 0.0) chain.p1_shifted(row, chain.idx(s2, w2)) += v;
                    }
                }
            }
        }
    }
    return chain;
}

Eigen::MatrixXd reselection_matrix(const OptionModel& model) {
    const int S = model.mdp.n_states, W = model.n_options();
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(S * W, S * W);
    for (int s = 0; s < S; ++s)
        for (int w = 0; w < W; ++w) {
            const double b = model.beta(s, w);
            for (int w2 = 0; w2 < W; ++w2) {
                double m = b * model.pi_omega(s, w2);
                if (w2 == w) m += 1.0 - b;
                r(s * W + w, s * W + w2) = m;
            }
        }
    return r;
}

ExactValues exact_values(const OptionModel& model) {
    check_size(model);
    const TabularMDP& mdp = model.mdp;
    const int S = mdp.n_states, W = model.n_options(), A = mdp.n_actions;
    const AugmentedChain chain = build_chain(model);
    const int n = chain.n_pairs();

    // (I - P_same) q = expected immediate reward per pair
    Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n, n) - chain.p1_same;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (int s = 0; s < S; ++s) {
        if (mdp.is_terminal(s)) continue;
        for (int w = 0; w < W; ++w) {
            const Eigen::VectorXd pi = model.action_probs(s, w);
            double er = 0.0;
            for (int a = 0; a < A; ++a) er += pi[a] * mdp.r(s, a);
            rhs[chain.idx(s, w)] = er;
        }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs);
    const Eigen::VectorXd q = lu.solve(rhs);
    const double resid = (lhs * q - rhs).cwiseAbs().maxCoeff();
    if (!(resid <= 1e-8 * std::max(1.0, rhs.cwiseAbs().maxCoeff())))
        throw std::runtime_error("exact_values: linear solve residual " + format_double(resid));

    ExactValues ev;
    ev.q_omega.resize(S, W);
    for (int s = 0; s < S; ++s)
        for (int w = 0; w < W; ++w) ev.q_omega(s, w) = q[chain.idx(s, w)];

    ev.v_omega.resize(S);
    for (int s = 0; s < S; ++s) ev.v_omega[s] = model.pi_omega.row(s).dot(ev.q_omega.row(s));

    ev.u.resize(W, S);
    for (int w = 0; w < W; ++w)
        for (int s = 0; s < S; ++s) {
            if (mdp.is_terminal(s)) {
                ev.u(w, s) = 0.0;
                continue;
            }
            const double b = model.beta(s, w);
            ev.u(w, s) = (1.0 - b) * ev.q_omega(s, w) + b * ev.v_omega[s];
        }

    ev.q_u.assign(W, Eigen::MatrixXd::Zero(S, A));
    for (int w = 0; w < W; ++w)
        for (int s = 0; s < S; ++s) {
            if (mdp.is_terminal(s)) continue;
            for (int a = 0; a < A; ++a) {
                double v = mdp.r(s, a);
                for (int s2 = 0; s2 < S; ++s2) {
                    const double p = mdp.p(s, a, s2);
                    if (p != 0.0) v += mdp.discount * p * ev.u(w, s2);
                }
                ev.q_u[w](s, a) = v;
            }
        }

    ev.rho = start_pair_weights(model).dot(q);
    return ev;
}

Eigen::VectorXd discounted_weighting(const AugmentedChain& chain,
                                     const Eigen::VectorXd& start_weights,
                                     ChainConditioning conditioning) {
    const Eigen::MatrixXd& p =
        conditioning == ChainConditioning::same ? chain.p1_same : chain.p1_shifted;
    const int n = chain.n_pairs();
    // mu' = w' (I - P)^{-1}  <=>  (I - P') mu = w
    Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n, n) - p.transpose();
    return Eigen::PartialPivLU<Eigen::MatrixXd>(lhs).solve(start_weights);
}

Eigen::VectorXd pair_point_mass(const AugmentedChain& chain, int s, int option) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(chain.n_pairs());
    w[chain.idx(s, option)] = 1.0;
    return w;
}

Eigen::VectorXd start_pair_weights(const OptionModel& model) {
    const int S = model.mdp.n_states, W = model.n_options();
    Eigen::VectorXd w(S * W);
    for (int s = 0; s < S; ++s)
        for (int o = 0; o < W; ++o) w[s * W + o] = model.mdp.start_dist[s] * model.pi_omega(s, o);
    return w;
}

std::vector<Eigen::MatrixXd> intra_policy_gradient(const OptionModel& model,
                                               const Eigen::VectorXd& start_weights) {
    const TabularMDP& mdp = model.mdp;
    const int S = mdp.n_states, W = model.n_options(), A = mdp.n_actions;
    const int F = model.features.n_features();
    const double tau = model.policy.temperature;

    const ExactValues ev = exact_values(model);
    const AugmentedChain chain = build_chain(model);
    const Eigen::VectorXd mu = discounted_weighting(chain, start_weights,
                                                    ChainConditioning::same);

    std::vector<Eigen::MatrixXd> grad(W, Eigen::MatrixXd::Zero(A, F));
    for (int s = 0; s < S; ++s) {
        if (mdp.is_terminal(s)) continue;
        const FeatureVec phi = model.features.featurize(s);
        for (int w = 0; w < W; ++w) {
            const double m = mu[chain.idx(s, w)];
            if (m == 0.0) continue;
            const Eigen::VectorXd pi = model.action_probs(s, w);
            // sum_a dpi(a|s)/dtheta Q_U(s,w,a) has rows
            //   pi_b (Q_U(s,w,b) - Q_Omega(s,w)) / tau * phi(s)
            for (int b = 0; b < A; ++b) {
                const double c = m * pi[b] * (ev.q_u[w](s, b) - ev.q_omega(s, w)) / tau;
                if (c != 0.0) axpy(c, phi, grad[w].row(b));
            }
        }
    }
    return grad;
}

Eigen::MatrixXd termination_gradient_exact(const OptionModel& model, int s1, int omega0) {
    const TabularMDP& mdp = model.mdp;
    const int S = mdp.n_states, W = model.n_options();
    const int F = model.features.n_features();

    const ExactValues ev = exact_values(model);
    const AugmentedChain chain = build_chain(model);
    const Eigen::VectorXd mu = discounted_weighting(chain, pair_point_mass(chain, s1, omega0),
                                                    ChainConditioning::shifted);

    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(W, F);
    for (int s = 0; s < S; ++s) {
        if (mdp.is_terminal(s)) continue;  // U is constant there
        const FeatureVec phi = model.features.featurize(s);
        for (int w = 0; w < W; ++w) {
            const double m = mu[chain.idx(s, w)];
            if (m == 0.0) continue;
            const double b = model.beta(s, w);
            const double adv = ev.q_omega(s, w) - ev.v_omega[s];
            const double c = -m * b * (1.0 - b) * adv;
            if (c != 0.0) axpy(c, phi, grad.row(w));
        }
    }
    return grad;
}

std::vector<Eigen::MatrixXd> fd_intra_policy_gradient(const OptionModel& model,
                                                  const Eigen::VectorXd& start_weights,
                                                  double h) {
    OptionModel probe = model;
    const int W = model.n_options();
    const auto objective = [&]() {
        const ExactValues ev = exact_values(probe);
        double rho = 0.0;
        const int S = model.mdp.n_states;
        for (int s = 0; s < S; ++s)
            for (int w = 0; w < W; ++w) rho += start_weights[s * W + w] * ev.q_omega(s, w);
        return rho;
    };
    std::vector<Eigen::MatrixXd> grad(W);
    for (int w = 0; w < W; ++w) {
        Eigen::MatrixXd& theta = probe.policy.weights[w];
        grad[w].resize(theta.rows(), theta.cols());
        for (int a = 0; a < theta.rows(); ++a)
            for (int f = 0; f < theta.cols(); ++f) {
                const double saved = theta(a, f);
                theta(a, f) = saved + h;
                const double plus = objective();
                theta(a, f) = saved - h;
                const double minus = objective();
                theta(a, f) = saved;
                grad[w](a, f) = (plus - minus) / (2.0 * h);
            }
    }
    return grad;
}

Eigen::MatrixXd fd_termination_gradient(const OptionModel& model, int s1, int omega0, double h) {
    OptionModel probe = model;
    Eigen::MatrixXd& vartheta = probe.termination.weights;
    Eigen::MatrixXd grad(vartheta.rows(), vartheta.cols());
    for (int w = 0; w < vartheta.rows(); ++w)
        for (int f = 0; f < vartheta.cols(); ++f) {
            const double saved = vartheta(w, f);
            vartheta(w, f) = saved + h;
            const double plus = exact_values(probe).u(omega0, s1);
            vartheta(w, f) = saved - h;
            const double minus = exact_values(probe).u(omega0, s1);
            vartheta(w, f) = saved;
            grad(w, f) = (plus - minus) / (2.0 * h);
        }
    return grad;
}

std::vector<Eigen::MatrixXd> intra_q_fixed_point(const OptionModel& model) {
    check_size(model);
    const TabularMDP& mdp = model.mdp;
    const int S = mdp.n_states, W = model.n_options(), A = mdp.n_actions;

    std::vector<Eigen::VectorXd> pi(S * W);
    Eigen::MatrixXd beta(S, W);
    for (int s = 0; s < S; ++s)
        for (int w = 0; w < W; ++w) {
            pi[s * W + w] = model.action_probs(s, w);
            beta(s, w) = model.beta(s, w);
        }

    std::vector<Eigen::MatrixXd> qu(W, Eigen::MatrixXd::Zero(S, A));
    Eigen::MatrixXd q_omega = Eigen::MatrixXd::Zero(S, W);
    for (int iter = 0; iter < 200000; ++iter) {
        for (int s = 0; s < S; ++s)
            for (int w = 0; w < W; ++w)
                q_omega(s, w) = mdp.is_terminal(s) ? 0.0 : pi[s * W + w].dot(qu[w].row(s));
        double diff = 0.0;
        for (int w = 0; w < W; ++w)
            for (int s = 0; s < S; ++s) {
                if (mdp.is_terminal(s)) continue;
                for (int a = 0; a < A; ++a) {
                    double v = mdp.r(s, a);
                    for (int s2 = 0; s2 < S; ++s2) {
                        const double p = mdp.p(s, a, s2);
                        if (p == 0.0 || mdp.is_terminal(s2)) continue;
                        const double b = beta(s2, w);
                        v += mdp.discount * p *
                             ((1.0 - b) * q_omega(s2, w) + b * q_omega.row(s2).maxCoeff());
                    }
                    diff = std::max(diff, std::abs(v - qu[w](s, a)));
                    qu[w](s, a) = v;
                }
            }
        if (diff <= 1e-13) break;
    }
    return qu;
}

double gradient_rel_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const double scale = std::max({a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff(), 1e-8});
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

double gradient_rel_error(const std::vector<Eigen::MatrixXd>& a,
                          const std::vector<Eigen::MatrixXd>& b) {
    double scale = 1e-8, diff = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        scale = std::max({scale, a[i].cwiseAbs().maxCoeff(), b[i].cwiseAbs().maxCoeff()});
        diff = std::max(diff, (a[i] - b[i]).cwiseAbs().maxCoeff());
    }
    return diff / scale;
}

Eigen::MatrixXd epsilon_greedy_probs(const Eigen::MatrixXd& q_omega, double epsilon) {
    PolicyOverOptions p{epsilon};
    Eigen::MatrixXd probs(q_omega.rows(), q_omega.cols());
    for (int s = 0; s < q_omega.rows(); ++s)
        probs.row(s) = p.probs(q_omega.row(s).transpose()).transpose();
    return probs;
}

RandomInstance random_instance(std::uint64_t seed, int max_states, int max_actions,
                               int max_options) {
    RngStream rng(seed);
    const int S = 2 + rng.uniform_int(std::max(1, max_states - 1));
    const int A = 2 + rng.uniform_int(std::max(1, max_actions - 1));
    const int W = 2 + rng.uniform_int(std::max(1, max_options - 1));

    TabularMDP mdp(S, A, 0.4 + 0.5 * rng.uniform());
    // optional terminal state (never the start)
    int terminal = -1;
    if (S > 2 && rng.bernoulli(0.4)) {
        terminal = 1 + rng.uniform_int(S - 1);
        mdp.terminal[terminal] = 1;
    }
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            double sum = 0.0;
            for (int s2 = 0; s2 < S; ++s2) {
                const double g = -std::log(1.0 - rng.uniform());  // Dirichlet(1,...,1)
                mdp.p(s, a, s2) = g;
                sum += g;
            }
            for (int s2 = 0; s2 < S; ++s2) mdp.p(s, a, s2) /= sum;
            mdp.r(s, a) = 2.0 * rng.uniform() - 1.0;
        }
    const int start = 0;
    mdp.start_dist[start] = 1.0;

    OptionModel model{std::move(mdp), FeatureMap::one_hot(S),
                      IntraOptionPolicy(W, A, S, 1.0), TerminationFunction(W, S),
                      Eigen::MatrixXd::Constant(S, W, 1.0 / W)};
    for (auto& w : model.policy.weights)
        for (int a = 0; a < A; ++a)
            for (int f = 0; f < S; ++f) w(a, f) = 2.0 * rng.uniform() - 1.0;
    for (int w = 0; w < W; ++w)
        for (int f = 0; f < S; ++f)
            model.termination.weights(w, f) = 2.0 * rng.uniform() - 1.0;

    // freeze pi_omega: epsilon-greedy against the uniform-selection solution
    model.pi_omega = epsilon_greedy_probs(exact_values(model).q_omega, 0.1);

    return RandomInstance{std::move(model), start, rng.uniform_int(W), seed};
}

VerifyReport run_verify(const VerifyOptions& opts) {
    VerifyReport report;
    RngStream seeder(opts.seed);
    for (int i = 0; i < opts.instances; ++i) {
        const std::uint64_t inst_seed = seeder.next_u64();
        RandomInstance inst =
            random_instance(inst_seed, opts.max_states, opts.max_actions, opts.max_options);
        const OptionModel& model = inst.model;
        const TabularMDP& mdp = model.mdp;
        const int W = model.n_options();

        InstanceStats st;
        st.index = i;
        st.n_states = mdp.n_states;
        st.n_actions = mdp.n_actions;
        st.n_options = W;
        st.seed = inst_seed;

        const AugmentedChain chain = build_chain(model);

        // chain mass conservation, both conditionings
        for (int s = 0; s < mdp.n_states; ++s)
            for (int w = 0; w < W; ++w) {
                const int row = chain.idx(s, w);
                const double expect = mdp.is_terminal(s) ? 0.0 : mdp.discount;
                st.chain_row_err = std::max(
                    {st.chain_row_err, std::abs(chain.p1_same.row(row).sum() - expect),
                     std::abs(chain.p1_shifted.row(row).sum() - expect)});
            }

        // factorization against the reselection operator:
        // p1_shifted = R M and p1_same = M R
        {
            const Eigen::MatrixXd r = reselection_matrix(model);
            Eigen::MatrixXd move = Eigen::MatrixXd::Zero(chain.n_pairs(), chain.n_pairs());
            for (int s = 0; s < mdp.n_states; ++s) {
                if (mdp.is_terminal(s)) continue;
                for (int w = 0; w < W; ++w) {
                    const Eigen::VectorXd pi = model.action_probs(s, w);
                    for (int a = 0; a < mdp.n_actions; ++a)
                        for (int s2 = 0; s2 < mdp.n_states; ++s2)
                            move(chain.idx(s, w), chain.idx(s2, w)) +=
                                mdp.discount * pi[a] * mdp.p(s, a, s2);
                }
            }
            st.factor_err = std::max((chain.p1_shifted - r * move).cwiseAbs().maxCoeff(),
                                     (chain.p1_same - move * r).cwiseAbs().maxCoeff());
        }

        // evaluation-equation plug-back residual
        const ExactValues ev = exact_values(model);
        for (int s = 0; s < mdp.n_states; ++s) {
            if (mdp.is_terminal(s)) continue;
            for (int w = 0; w < W; ++w) {
                const Eigen::VectorXd pi = model.action_probs(s, w);
                double q = 0.0;
                for (int a = 0; a < mdp.n_actions; ++a) q += pi[a] * ev.q_u[w](s, a);
                st.residual = std::max(st.residual, std::abs(q - ev.q_omega(s, w)));
            }
        }

        // intra-option policy gradient against finite differences of rho
        const Eigen::VectorXd start_w = start_pair_weights(model);
        std::vector<Eigen::MatrixXd> analytic1 = intra_policy_gradient(model, start_w);
        if (opts.corrupt_gradient) analytic1[0](0, 0) += 1e-3;
        st.intra_grad_rel = gradient_rel_error(analytic1, fd_intra_policy_gradient(model, start_w));

        // termination gradient against finite differences of U(omega0, s1)
        const Eigen::MatrixXd analytic2 =
            termination_gradient_exact(model, inst.start_state, inst.start_option);
        st.term_grad_rel = gradient_rel_error(
            analytic2, fd_termination_gradient(model, inst.start_state, inst.start_option));

        // fixed point vs a greedy-materialized exact solve
        {
            const std::vector<Eigen::MatrixXd> qu = intra_q_fixed_point(model);
            Eigen::MatrixXd q_omega(mdp.n_states, W);
            for (int s = 0; s < mdp.n_states; ++s)
                for (int w = 0; w < W; ++w)
                    q_omega(s, w) = mdp.is_terminal(s)
                                        ? 0.0
                                        : model.action_probs(s, w).dot(qu[w].row(s));
            OptionModel greedy = model;
            greedy.pi_omega = epsilon_greedy_probs(q_omega, 0.0);
            st.fixpoint_err = (exact_values(greedy).q_omega - q_omega).cwiseAbs().maxCoeff();
        }

        // weighting vs truncated power series, tail <= gamma^{T+1}/(1-gamma)
        {
            constexpr int T = 200;
            const Eigen::VectorXd mu =
                discounted_weighting(chain, start_w, ChainConditioning::same);
            Eigen::VectorXd acc = start_w, term = start_w;
            for (int t = 1; t <= T; ++t) {
                term = chain.p1_same.transpose() * term;
                acc += term;
            }
            const double tail =
                std::pow(mdp.discount, T + 1) / (1.0 - mdp.discount) + 1e-12;
            const double err = (mu - acc).cwiseAbs().maxCoeff();
            st.mu_series_err = err > tail ? err : 0.0;
        }

        st.pass = st.chain_row_err <= 1e-12 && st.factor_err <= 1e-12 &&
                  st.residual <= 1e-10 && st.intra_grad_rel <= 1e-5 && st.term_grad_rel <= 1e-5 &&
                  st.fixpoint_err <= 1e-9 && st.mu_series_err == 0.0;

        if (!st.pass && report.failing_index < 0) {
            report.failing_index = i;
            std::ostringstream os;
            save_mdp_text(mdp, os);
            report.failing_mdp_text = os.str();
        }
        report.worst_chain = std::max(report.worst_chain, st.chain_row_err);
        report.worst_factor = std::max(report.worst_factor, st.factor_err);
        report.worst_residual = std::max(report.worst_residual, st.residual);
        report.worst_intra_grad = std::max(report.worst_intra_grad, st.intra_grad_rel);
        report.worst_term_grad = std::max(report.worst_term_grad, st.term_grad_rel);
        report.worst_fixpoint = std::max(report.worst_fixpoint, st.fixpoint_err);
        report.worst_mu = std::max(report.worst_mu, st.mu_series_err);
        report.instances.push_back(st);
    }
    report.pass = report.failing_index < 0;
    return report;
}

}  // namespace oc
