#include "oc/pinball.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace oc {

namespace {

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

bool segments_intersect(const std::array<double, 2>& p1, const std::array<double, 2>& p2,
                        const std::array<double, 2>& q1, const std::array<double, 2>& q2) {
    auto cross = [](double ox, double oy, double ax, double ay, double bx, double by) {
        return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox);
    };
    const double d1 = cross(q1[0], q1[1], q2[0], q2[1], p1[0], p1[1]);
    const double d2 = cross(q1[0], q1[1], q2[0], q2[1], p2[0], p2[1]);
    const double d3 = cross(p1[0], p1[1], p2[0], p2[1], q1[0], q1[1]);
    const double d4 = cross(p1[0], p1[1], p2[0], p2[1], q2[0], q2[1]);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

void validate_config(const PinballConfig& cfg) {
    if (!(cfg.ball_radius > 0.0)) throw std::invalid_argument("pinball: ball radius must be > 0");
    if (!(cfg.drag > 0.0 && cfg.drag <= 1.0))
        throw std::invalid_argument("pinball: drag must be in (0,1]");
    if (cfg.substeps < 1) throw std::invalid_argument("pinball: substeps must be >= 1");
    for (const auto& poly : cfg.obstacles) {
        if (poly.size() < 3) throw std::invalid_argument("pinball: polygon needs >= 3 vertices");
        const int n = static_cast<int>(poly.size());
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                if (j == i + 1 || (i == 0 && j == n - 1)) continue;  // shared endpoints
                if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]))
                    throw std::invalid_argument("pinball: polygon is self-intersecting");
            }
        if (point_in_polygon(cfg.start[0], cfg.start[1], poly))
            throw std::invalid_argument("pinball: start lies inside an obstacle");
    }
}

}  // namespace

bool point_in_polygon(double x, double y, const std::vector<std::array<double, 2>>& poly) {
    bool inside = false;
    const int n = static_cast<int>(poly.size());
    for (int i = 0, j = n - 1; i < n; j = i++) {
        const auto& pi = poly[i];
        const auto& pj = poly[j];
        if ((pi[1] > y) != (pj[1] > y) &&
            x < (pj[0] - pi[0]) * (y - pi[1]) / (pj[1] - pi[1]) + pi[0])
            inside = !inside;
    }
    return inside;
}

SweepHit sweep_circle_segment(double cx, double cy, double dx, double dy, double r, double ax,
                              double ay, double bx, double by) {
    SweepHit best;

    const double ex = bx - ax, ey = by - ay;
    const double len2 = ex * ex + ey * ey;

    // face contact: distance to the segment's line reaches r while the
    // projection falls inside the segment
    if (len2 > 0.0) {
        const double len = std::sqrt(len2);
        double nx = -ey / len, ny = ex / len;
        double dist0 = (cx - ax) * nx + (cy - ay) * ny;
        if (dist0 < 0.0) {  // orient the normal toward the circle
            nx = -nx;
            ny = -ny;
            dist0 = -dist0;
        }
        const double approach = dx * nx + dy * ny;  // < 0 means moving toward the line
        if (approach < 0.0) {
            double t = (r - dist0) / approach;  // dist(t) = dist0 + t*approach = r
            if (dist0 < r) t = 0.0;             // already overlapping the slab
            if (t >= 0.0 && t <= 1.0) {
                const double px = cx + t * dx, py = cy + t * dy;
                const double u = ((px - ax) * ex + (py - ay) * ey) / len2;
                if (u >= 0.0 && u <= 1.0) {
                    best.hit = true;
                    best.t = t;
                    best.nx = nx;
                    best.ny = ny;
                }
            }
        }
    }

    // endpoint contacts: |c(t) - p| = r
    for (const auto& [px, py] : {std::pair{ax, ay}, std::pair{bx, by}}) {
        const double fx = cx - px, fy = cy - py;
        const double a = dx * dx + dy * dy;
        const double b = 2.0 * (fx * dx + fy * dy);
        const double c = fx * fx + fy * fy - r * r;
        double t;
        if (c <= 0.0) {
            if (b >= 0.0) continue;  // overlapping but separating
            t = 0.0;
        } else {
            if (a == 0.0) continue;
            const double disc = b * b - 4.0 * a * c;
            if (disc < 0.0) continue;
            t = (-b - std::sqrt(disc)) / (2.0 * a);
            if (t < 0.0 || t > 1.0) continue;
        }
        if (t < best.t || !best.hit) {
            const double qx = cx + t * dx - px, qy = cy + t * dy - py;
            const double qn = std::sqrt(qx * qx + qy * qy);
            if (qn == 0.0) continue;
            // only count as a hit when actually approaching the corner
            if (dx * qx / qn + dy * qy / qn < 0.0) {
                best.hit = true;
                best.t = t;
                best.nx = qx / qn;
                best.ny = qy / qn;
            }
        }
    }
    return best;
}

PinballConfig load_pinball_config(std::istream& in) {
    PinballConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        auto fail = [&](const std::string& what) {
            throw std::invalid_argument("pinball config line " + std::to_string(lineno) + ": " +
                                        what);
        };
        if (tag == "ball") {
            if (!(ls >> cfg.ball_radius)) fail("bad ball radius");
        } else if (tag == "start") {
            if (!(ls >> cfg.start[0] >> cfg.start[1])) fail("bad start");
        } else if (tag == "target") {
            if (!(ls >> cfg.target[0] >> cfg.target[1] >> cfg.target_radius)) fail("bad target");
        } else if (tag == "polygon") {
            std::vector<std::array<double, 2>> poly;
            double x, y;
            while (ls >> x >> y) poly.push_back({x, y});
            if (poly.size() < 3) fail("polygon needs at least 3 vertices");
            cfg.obstacles.push_back(std::move(poly));
        } else {
            fail("unknown tag '" + tag + "'");
        }
    }
    validate_config(cfg);
    return cfg;
}

PinballConfig load_pinball_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open pinball config: " + path);
    return load_pinball_config(in);
}

PinballConfig default_pinball_maze() {
    PinballConfig cfg;
    cfg.ball_radius = 0.02;
    cfg.start = {0.15, 0.15};
    cfg.target = {0.85, 0.85};
    cfg.target_radius = 0.06;
    cfg.obstacles = {
        {{0.42, 0.28}, {0.50, 0.28}, {0.50, 0.95}, {0.42, 0.95}},
        {{0.60, 0.40}, {0.95, 0.40}, {0.95, 0.48}, {0.60, 0.48}},
    };
    validate_config(cfg);
    return cfg;
}

Pinball::Pinball(PinballConfig config) : config_(std::move(config)) {
    validate_config(config_);
    state_ = PinballState{config_.start[0], config_.start[1], 0.0, 0.0};
}

Observation Pinball::normalize(const PinballState& s) {
    return Observation{-1, {s.x, s.y, (s.xdot + 1.0) / 2.0, (s.ydot + 1.0) / 2.0}};
}

Observation Pinball::reset(RngStream&) {
    state_ = PinballState{config_.start[0], config_.start[1], 0.0, 0.0};
    return normalize(state_);
}

bool Pinball::advance_substep() {
    const double scale = config_.ball_radius * (20.0 / config_.substeps) / 20.0;
    const double r = config_.ball_radius;
    double remaining = 1.0;
    int bounces = 0;
    while (remaining > 1e-12) {
        const double dx = state_.xdot * scale * remaining;
        const double dy = state_.ydot * scale * remaining;

        SweepHit first;
        for (const auto& poly : config_.obstacles) {
            const int n = static_cast<int>(poly.size());
            for (int i = 0; i < n; ++i) {
                const auto& a = poly[i];
                const auto& b = poly[(i + 1) % n];
                const SweepHit h =
                    sweep_circle_segment(state_.x, state_.y, dx, dy, r, a[0], a[1], b[0], b[1]);
                if (h.hit && (!first.hit || h.t < first.t)) first = h;
            }
        }
        // box walls: the ball stays fully inside the unit square
        const auto wall = [&](double pos, double d, double lo, double hi, double nx, double ny) {
            if (d < 0.0 && pos + d < lo) {
                const double t = (lo - pos) / d;
                if (t < first.t || !first.hit) first = SweepHit{true, std::max(t, 0.0), nx, ny};
            } else if (d > 0.0 && pos + d > hi) {
                const double t = (hi - pos) / d;
                if (t < first.t || !first.hit) first = SweepHit{true, std::max(t, 0.0), -nx, -ny};
            }
        };
        wall(state_.x, dx, r, 1.0 - r, 1.0, 0.0);
        wall(state_.y, dy, r, 1.0 - r, 0.0, 1.0);

        if (!first.hit) {
            state_.x += dx;
            state_.y += dy;
            break;
        }
        state_.x += dx * first.t;
        state_.y += dy * first.t;
        // elastic reflection about the contact normal
        const double vn = state_.xdot * first.nx + state_.ydot * first.ny;
        state_.xdot = clamp_unit(state_.xdot - 2.0 * vn * first.nx);
        state_.ydot = clamp_unit(state_.ydot - 2.0 * vn * first.ny);
        remaining *= 1.0 - first.t;
        if (++bounces >= 4) {  // wedge trap: give up on this substep
            state_.xdot = 0.0;
            state_.ydot = 0.0;
            break;
        }
    }

    for (const auto& poly : config_.obstacles)
        if (point_in_polygon(state_.x, state_.y, poly))
            throw std::runtime_error("pinball: ball tunneled into an obstacle at (" +
                                     format_double(state_.x) + "," + format_double(state_.y) +
                                     ")");

    const double gx = state_.x - config_.target[0];
    const double gy = state_.y - config_.target[1];
    return gx * gx + gy * gy <= config_.target_radius * config_.target_radius;
}

EnvStep Pinball::step(int action, RngStream&) {
    if (action < 0 || action >= 5) throw std::invalid_argument("pinball: bad action");
    switch (action) {
        case 0: state_.xdot = clamp_unit(state_.xdot + config_.thrust); break;
        case 1: state_.xdot = clamp_unit(state_.xdot - config_.thrust); break;
        case 2: state_.ydot = clamp_unit(state_.ydot + config_.thrust); break;
        case 3: state_.ydot = clamp_unit(state_.ydot - config_.thrust); break;
        default: break;  // null
    }
    bool reached = false;
    for (int i = 0; i < config_.substeps && !reached; ++i) reached = advance_substep();
    if (reached) return EnvStep{normalize(state_), 10000.0, true};

    state_.xdot = clamp_unit(state_.xdot * config_.drag);
    state_.ydot = clamp_unit(state_.ydot * config_.drag);
    return EnvStep{normalize(state_), action == 4 ? -1.0 : -5.0, false};
}

}  // namespace oc
