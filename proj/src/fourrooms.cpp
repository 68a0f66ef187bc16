#include "oc/fourrooms.hpp"

#include <fstream>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace oc {

const char* const FourRooms::kMap =
    "wwwwwwwwwwwww\n"
    "w     w     w\n"
    "w     w     w\n"
    "w           w\n"
    "w     w     w\n"
    "w     w     w\n"
    "ww wwww     w\n"
    "w     www www\n"
    "w     w     w\n"
    "w     w     w\n"
    "w           w\n"
    "w     w     w\n"
    "wwwwwwwwwwwww\n";

namespace {
constexpr int kDRow[4] = {-1, 1, 0, 0};
constexpr int kDCol[4] = {0, 0, -1, 1};
constexpr double kSlipProb = 1.0 / 3.0;

std::vector<std::string> split_rows(const std::string& text) {
    std::vector<std::string> rows;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line))
        if (!line.empty()) rows.push_back(line);
    return rows;
}
}  // namespace

FourRooms::FourRooms(int relocation_episode)
    : FourRooms(split_rows(kMap), relocation_episode) {}

FourRooms::FourRooms(const std::vector<std::string>& rows, int relocation_episode)
    : relocation_episode_(relocation_episode) {
    build(rows);
}

FourRooms FourRooms::from_map_file(const std::string& path, int relocation_episode) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open map file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return FourRooms(split_rows(ss.str()), relocation_episode);
}

void FourRooms::build(const std::vector<std::string>& rows) {
    if (rows.size() != kRows) throw std::invalid_argument("map must have 13 rows");
    for (auto& g : grid_) g.fill(-1);
    for (int r = 0; r < kRows; ++r) {
        if (rows[r].size() != kCols) throw std::invalid_argument("map rows must have 13 columns");
        for (int c = 0; c < kCols; ++c) {
            if (rows[r][c] == 'w') continue;
            grid_[r][c] = static_cast<int>(cells_.size());
            cells_.push_back({r, c});
        }
    }
    empty_neighbors_.resize(cells_.size());
    for (int s = 0; s < n_states(); ++s) {
        const auto [r, c] = cells_[s];
        for (int a = 0; a < 4; ++a) {
            const int n = grid_[r + kDRow[a]][c + kDCol[a]];
            if (n >= 0) empty_neighbors_[s].push_back(n);
        }
        if (empty_neighbors_[s].empty())
            throw std::invalid_argument("map has an isolated cell at (" + std::to_string(r) +
                                        "," + std::to_string(c) + ")");
    }
    // goal reachability = connectivity of the navigable set
    std::vector<char> seen(cells_.size(), 0);
    std::queue<int> frontier;
    frontier.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!frontier.empty()) {
        const int s = frontier.front();
        frontier.pop();
        for (int n : empty_neighbors_[s])
            if (!seen[n]) {
                seen[n] = 1;
                ++reached;
                frontier.push(n);
            }
    }
    if (reached != n_states()) throw std::invalid_argument("map is not connected");

    // east doorway: the hallway cell joining the two right-hand rooms
    goal_ = grid_[7][9];
    if (goal_ < 0)
        goal_ = grid_[kRows / 2][kCols - 2];  // non-canonical maps: pick any navigable cell
    for (int r = 8; r <= 11; ++r)
        for (int c = 7; c <= 11; ++c)
            if (grid_[r][c] >= 0) lower_right_room_.push_back(grid_[r][c]);
}

Observation FourRooms::reset(RngStream& rng) {
    // uniform over all non-goal cells
    int s = rng.uniform_int(n_states() - 1);
    if (s >= goal_) ++s;
    state_ = s;
    return Observation{state_, {}};
}

int FourRooms::cell_after_move(int s, int action) const {
    const auto [r, c] = cells_[s];
    const int target = grid_[r + kDRow[action]][c + kDCol[action]];
    return target >= 0 ? target : s;
}

StepOutcome FourRooms::step_from(int s, int action, RngStream& rng) const {
    if (s == goal_) throw std::invalid_argument("step from the goal cell");
    if (action < 0 || action >= 4) throw std::invalid_argument("bad action");

    int next;
    if (!rng.bernoulli(kSlipProb)) {
        next = cell_after_move(s, action);
    } else {
        // slip: uniform over the empty adjacent cells other than the intended
        // target (all of them when the intended move hits a wall)
        const auto [r, c] = cells_[s];
        const int intended = grid_[r + kDRow[action]][c + kDCol[action]];
        const auto& neigh = empty_neighbors_[s];
        int count = 0;
        for (int n : neigh) count += n != intended;
        int pick = rng.uniform_int(count);
        next = s;
        for (int n : neigh) {
            if (n == intended) continue;
            if (pick-- == 0) {
                next = n;
                break;
            }
        }
    }
    const bool done = next == goal_;
    return StepOutcome{next, done ? 1.0 : 0.0, done};
}

EnvStep FourRooms::step(int action, RngStream& rng) {
    const StepOutcome out = step_from(state_, action, rng);
    state_ = out.next_state;
    return EnvStep{Observation{state_, {}}, out.reward, out.done};
}

void FourRooms::on_episode_start(int episode, RngStream& rng) {
    if (episode == relocation_episode_) relocate_goal(rng);
}

void FourRooms::relocate_goal(RngStream& rng) {
    if (lower_right_room_.empty()) throw std::logic_error("no lower-right room cells");
    goal_ = lower_right_room_[rng.uniform_int(static_cast<int>(lower_right_room_.size()))];
}

TabularMDP FourRooms::to_mdp(double gamma) const {
    TabularMDP mdp(n_states(), 4, gamma);
    mdp.terminal[goal_] = 1;
    for (int s = 0; s < n_states(); ++s) {
        if (s == goal_) {
            for (int a = 0; a < 4; ++a) mdp.p(s, a, s) = 1.0;  // absorbing in the tensor
            continue;
        }
        mdp.start_dist[s] = 1.0 / (n_states() - 1);
        for (int a = 0; a < 4; ++a) {
            const int intended_cell = cell_after_move(s, a);
            mdp.p(s, a, intended_cell) += 1.0 - kSlipProb;
            const auto [r, c] = cells_[s];
            const int intended = grid_[r + kDRow[a]][c + kDCol[a]];
            int count = 0;
            for (int n : empty_neighbors_[s]) count += n != intended;
            for (int n : empty_neighbors_[s])
                if (n != intended) mdp.p(s, a, n) += kSlipProb / count;
            mdp.r(s, a) = mdp.p(s, a, goal_);  // expected reward
        }
    }
    finalize_rows(mdp);
    return mdp;
}

}  // namespace oc
