#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "oc/rng.hpp"

namespace oc {

/// Thrown when a learning update produces a non-finite or absurdly large value.
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Finite MDP: transition tensor P(s'|s,a), reward r(s,a), discount,
/// start distribution and terminal flags. Immutable once built; safe to
/// share across concurrent runs.
struct TabularMDP {
    int n_states = 0;
    int n_actions = 0;
    std::vector<double> transition;  // [s * A * S + a * S + s']
    std::vector<double> reward;      // [s * A + a]
    double discount = 0.0;
    std::vector<double> start_dist;      // over states
    std::vector<std::uint8_t> terminal;  // per state

    TabularMDP() = default;
    TabularMDP(int states, int actions, double gamma)
        : n_states(states),
          n_actions(actions),
          transition(static_cast<std::size_t>(states) * actions * states, 0.0),
          reward(static_cast<std::size_t>(states) * actions, 0.0),
          discount(gamma),
          start_dist(states, 0.0),
          terminal(states, 0) {}

    double p(int s, int a, int s2) const {
        return transition[(static_cast<std::size_t>(s) * n_actions + a) * n_states + s2];
    }
    double& p(int s, int a, int s2) {
        return transition[(static_cast<std::size_t>(s) * n_actions + a) * n_states + s2];
    }
    double r(int s, int a) const { return reward[static_cast<std::size_t>(s) * n_actions + a]; }
    double& r(int s, int a) { return reward[static_cast<std::size_t>(s) * n_actions + a]; }
    bool is_terminal(int s) const { return terminal[s] != 0; }
};

struct StepOutcome {
    int next_state = -1;
    double reward = 0.0;
    bool done = false;  // true iff next_state is terminal
};

/// Diagnostic check of all TabularMDP invariants. Returns one message per
/// violation, naming the offending index and quantity; empty means valid.
std::vector<std::string> validate(const TabularMDP& mdp);

/// Sample one transition. Stepping from a terminal state is a contract
/// violation and throws.
StepOutcome step(const TabularMDP& mdp, int s, int a, RngStream& rng);

/// Draw an initial state from the start distribution.
int sample_start(const TabularMDP& mdp, RngStream& rng);

/// Renormalize transition rows and the start distribution that are within
/// 1e-9 of summing to one; throws if any row is further off than that.
/// Constructors that assemble tensors from float arithmetic call this.
void finalize_rows(TabularMDP& mdp);

/// Text fixture format:
///   mdp <n_states> <n_actions> <gamma>
///   t <s> <a> <s'> <p>
///   r <s> <a> <value>
///   start <s> <p>
///   terminal <s>
/// Unspecified transitions have probability 0; unspecified rewards are 0.
/// '#' starts a comment.
TabularMDP load_mdp_text(std::istream& in);
TabularMDP load_mdp_file(const std::string& path);
void save_mdp_text(const TabularMDP& mdp, std::ostream& out);

/// Shortest round-trip decimal formatting (std::to_chars).
std::string format_double(double v);

}  // namespace oc
