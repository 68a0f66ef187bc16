#include "oc/mdp.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace oc {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

std::vector<std::string> validate(const TabularMDP& mdp) {
    std::vector<std::string> out;
    if (mdp.n_states <= 0 || mdp.n_actions <= 0) {
        out.push_back("empty state or action set");
        return out;
    }
    if (!(mdp.discount >= 0.0 && mdp.discount < 1.0))
        out.push_back("discount out of range: " + format_double(mdp.discount));

    for (int s = 0; s < mdp.n_states; ++s) {
        for (int a = 0; a < mdp.n_actions; ++a) {
            double sum = 0.0;
            for (int s2 = 0; s2 < mdp.n_states; ++s2) {
                const double v = mdp.p(s, a, s2);
                if (v < 0.0 || v > 1.0)
                    out.push_back("transition entry " + format_double(v) + " out of [0,1] at (" +
                                  std::to_string(s) + "," + std::to_string(a) + "," +
                                  std::to_string(s2) + ")");
                sum += v;
            }
            if (std::abs(sum - 1.0) > 1e-12)
                out.push_back("row sum " + format_double(sum) + " at (" + std::to_string(s) + "," +
                              std::to_string(a) + ")");
        }
    }

    double start_sum = 0.0;
    for (int s = 0; s < mdp.n_states; ++s) {
        const double v = mdp.start_dist[s];
        if (v < 0.0 || v > 1.0)
            out.push_back("start_dist entry " + format_double(v) + " out of [0,1] at " +
                          std::to_string(s));
        start_sum += v;
    }
    if (std::abs(start_sum - 1.0) > 1e-12)
        out.push_back("start_dist sum " + format_double(start_sum));
    return out;
}

StepOutcome step(const TabularMDP& mdp, int s, int a, RngStream& rng) {
    if (mdp.is_terminal(s))
        throw std::invalid_argument("step from terminal state " + std::to_string(s));
    if (a < 0 || a >= mdp.n_actions)
        throw std::invalid_argument("action " + std::to_string(a) + " out of range");
    const std::size_t base = (static_cast<std::size_t>(s) * mdp.n_actions + a) * mdp.n_states;
    const int s2 = rng.categorical({mdp.transition.data() + base,
                                    static_cast<std::size_t>(mdp.n_states)});
    return StepOutcome{s2, mdp.r(s, a), mdp.is_terminal(s2)};
}

int sample_start(const TabularMDP& mdp, RngStream& rng) {
    return rng.categorical(mdp.start_dist);
}

void finalize_rows(TabularMDP& mdp) {
    for (int s = 0; s < mdp.n_states; ++s) {
        for (int a = 0; a < mdp.n_actions; ++a) {
            double sum = 0.0;
            for (int s2 = 0; s2 < mdp.n_states; ++s2) sum += mdp.p(s, a, s2);
            if (std::abs(sum - 1.0) > 1e-9)
                throw std::invalid_argument("transition row sum " + format_double(sum) + " at (" +
                                            std::to_string(s) + "," + std::to_string(a) + ")");
            for (int s2 = 0; s2 < mdp.n_states; ++s2) mdp.p(s, a, s2) /= sum;
        }
    }
    double sum = 0.0;
    for (double v : mdp.start_dist) sum += v;
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("start distribution sum " + format_double(sum));
    for (double& v : mdp.start_dist) v /= sum;
}

TabularMDP load_mdp_text(std::istream& in) {
    TabularMDP mdp;
    bool have_header = false;
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
            throw std::invalid_argument("mdp text line " + std::to_string(lineno) + ": " + what);
        };
        if (tag == "mdp") {
            int ns, na;
            double gamma;
            if (!(ls >> ns >> na >> gamma)) fail("bad header");
            mdp = TabularMDP(ns, na, gamma);
            have_header = true;
        } else if (!have_header) {
            fail("entry before 'mdp' header");
        } else if (tag == "t") {
            int s, a, s2;
            double p;
            if (!(ls >> s >> a >> s2 >> p)) fail("bad transition");
            if (s < 0 || s >= mdp.n_states || a < 0 || a >= mdp.n_actions || s2 < 0 ||
                s2 >= mdp.n_states)
                fail("transition index out of range");
            mdp.p(s, a, s2) = p;
        } else if (tag == "r") {
            int s, a;
            double v;
            if (!(ls >> s >> a >> v)) fail("bad reward");
            if (s < 0 || s >= mdp.n_states || a < 0 || a >= mdp.n_actions)
                fail("reward index out of range");
            mdp.r(s, a) = v;
        } else if (tag == "start") {
            int s;
            double p;
            if (!(ls >> s >> p)) fail("bad start entry");
            if (s < 0 || s >= mdp.n_states) fail("start index out of range");
            mdp.start_dist[s] = p;
        } else if (tag == "terminal") {
            int s;
            if (!(ls >> s)) fail("bad terminal entry");
            if (s < 0 || s >= mdp.n_states) fail("terminal index out of range");
            mdp.terminal[s] = 1;
        } else {
            fail("unknown tag '" + tag + "'");
        }
    }
    if (!have_header) throw std::invalid_argument("mdp text: missing 'mdp' header");
    return mdp;
}

TabularMDP load_mdp_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open mdp file: " + path);
    return load_mdp_text(in);
}

void save_mdp_text(const TabularMDP& mdp, std::ostream& out) {
    out << "mdp " << mdp.n_states << " " << mdp.n_actions << " " << format_double(mdp.discount)
        << "\n";
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a)
            for (int s2 = 0; s2 < mdp.n_states; ++s2)
                if (mdp.p(s, a, s2) != 0.0)
                    out << "t " << s << " " << a << " " << s2 << " "
                        << format_double(mdp.p(s, a, s2)) << "\n";
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a)
            if (mdp.r(s, a) != 0.0)
                out << "r " << s << " " << a << " " << format_double(mdp.r(s, a)) << "\n";
    for (int s = 0; s < mdp.n_states; ++s)
        if (mdp.start_dist[s] != 0.0)
            out << "start " << s << " " << format_double(mdp.start_dist[s]) << "\n";
    for (int s = 0; s < mdp.n_states; ++s)
        if (mdp.is_terminal(s)) out << "terminal " << s << "\n";
}

}  // namespace oc
