#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "oc/env.hpp"

namespace oc {

struct PinballState {
    double x = 0.0, y = 0.0;      // positions in [0,1]
    double xdot = 0.0, ydot = 0.0;  // velocities in [-1,1]
};

/// Maze description. Text format, one directive per line ('#' comments):
///   ball <radius>
///   start <x> <y>
///   target <x> <y> <radius>
///   polygon <x1> <y1> <x2> <y2> ... (at least 3 vertices)
struct PinballConfig {
    std::vector<std::vector<std::array<double, 2>>> obstacles;
    std::array<double, 2> target{0.9, 0.9};
    double target_radius = 0.05;
    std::array<double, 2> start{0.1, 0.1};
    double ball_radius = 0.02;
    double drag = 0.995;
    int substeps = 20;
    double thrust = 0.2;
};

PinballConfig load_pinball_config(std::istream& in);
PinballConfig load_pinball_file(const std::string& path);

/// The maze shipped with the repository (also configs/pinball_box.cfg).
PinballConfig default_pinball_maze();

/// Continuous pinball domain. Five actions: 0 accel-x+, 1 accel-x-,
/// 2 accel-y+, 3 accel-y-, 4 null. A thrust adds +-thrust to the velocity
/// component (components clamped to [-1,1]); the ball then advances over
/// `substeps` integration substeps, each moving the center by
/// velocity * ball_radius * (20/substeps) / 20, with elastic reflection off
/// polygon edges and the box walls; afterwards velocities are multiplied by
/// the drag coefficient. Rewards: -5 per thrust, -1 for null, +10000 on
/// reaching the target (episode ends).
class Pinball : public Env {
public:
    explicit Pinball(PinballConfig config);

    int n_actions() const override { return 5; }
    Observation reset(RngStream& rng) override;
    EnvStep step(int action, RngStream& rng) override;

    const PinballState& state() const { return state_; }
    void set_state(const PinballState& s) { state_ = s; }
    const PinballConfig& config() const { return config_; }

    /// (x, y, (xdot+1)/2, (ydot+1)/2): the normalized feature input.
    static Observation normalize(const PinballState& s);

private:
    bool advance_substep();  // true when the target was reached
    PinballConfig config_;
    PinballState state_;
};

/// Earliest fraction t in [0,1] at which a circle of radius r moving from
/// (cx,cy) by (dx,dy) touches segment (ax,ay)-(bx,by); hit=false otherwise.
/// (nx,ny) is the contact normal pointing back toward the circle.
struct SweepHit {
    bool hit = false;
    double t = 1.0;
    double nx = 0.0, ny = 0.0;
};
SweepHit sweep_circle_segment(double cx, double cy, double dx, double dy, double r, double ax,
                              double ay, double bx, double by);

bool point_in_polygon(double x, double y, const std::vector<std::array<double, 2>>& poly);

}  // namespace oc
