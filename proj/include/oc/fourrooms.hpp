#pragma once

#include <array>
#include <string>
#include <vector>

#include "oc/env.hpp"

namespace oc {

/// Stochastic four-rooms gridworld on a 13x13 map with 104 navigable cells.
///
/// Actions: 0 up, 1 down, 2 left, 3 right. A move succeeds with probability
/// 2/3 (walls block: the agent stays); otherwise the agent slips uniformly
/// to one of the empty adjacent cells other than the intended target.
/// Reward is +1 on entering the goal, which ends the episode.
///
/// The initial goal is the east doorway (the hallway joining the two
/// right-hand rooms). on_episode_start relocates it to a uniformly random
/// cell of the lower-right room at the configured episode, after which
/// episode starts remain uniform over all non-goal cells.
class FourRooms : public Env {
public:
    static constexpr int kRows = 13;
    static constexpr int kCols = 13;
    static const char* const kMap;  // kRows strings of kCols, 'w' wall

    explicit FourRooms(int relocation_episode = 1000);
    static FourRooms from_map_file(const std::string& path, int relocation_episode = 1000);

    int n_actions() const override { return 4; }
    Observation reset(RngStream& rng) override;
    EnvStep step(int action, RngStream& rng) override;
    void on_episode_start(int episode, RngStream& rng) override;

    int n_states() const { return static_cast<int>(cells_.size()); }
    int state_of_cell(int row, int col) const { return grid_[row][col]; }
    std::array<int, 2> cell_of_state(int s) const { return cells_[s]; }
    bool is_wall(int row, int col) const { return grid_[row][col] < 0; }
    int goal_state() const { return goal_; }
    int relocation_episode() const { return relocation_episode_; }

    StepOutcome step_from(int s, int action, RngStream& rng) const;
    void relocate_goal(RngStream& rng);

    /// Exact MDP for the current goal (expected rewards; goal absorbing).
    TabularMDP to_mdp(double gamma) const;

private:
    explicit FourRooms(const std::vector<std::string>& rows, int relocation_episode);
    void build(const std::vector<std::string>& rows);
    int cell_after_move(int s, int action) const;  // wall => stay

    std::vector<std::array<int, 2>> cells_;          // state -> (row, col)
    std::array<std::array<int, kCols>, kRows> grid_;  // (row, col) -> state or -1
    std::vector<std::vector<int>> empty_neighbors_;   // per state
    std::vector<int> lower_right_room_;               // candidate goal states
    int goal_ = -1;
    int relocation_episode_;
    int state_ = 0;
};

}  // namespace oc
