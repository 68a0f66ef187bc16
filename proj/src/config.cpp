#include "oc/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace oc {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Parser {
    RunConfig cfg;
    int line = 0;

    [[noreturn]] void fail(const std::string& what) const { throw ConfigError(line, what); }

    double to_double(const std::string& v) const {
        try {
            std::size_t used = 0;
            const double d = std::stod(v, &used);
            if (used != v.size()) fail("trailing characters in number '" + v + "'");
            return d;
        } catch (const ConfigError&) {
            throw;
        } catch (...) {
            fail("expected a number, got '" + v + "'");
        }
    }
    long long to_int(const std::string& v) const {
        long long out = 0;
        const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc() || p != v.data() + v.size())
            fail("expected an integer, got '" + v + "'");
        return out;
    }
    bool to_flag(const std::string& v) const {
        if (v == "on" || v == "true" || v == "1") return true;
        if (v == "off" || v == "false" || v == "0") return false;
        fail("expected on/off, got '" + v + "'");
    }

    void set(const std::string& section, const std::string& key, const std::string& value) {
        AgentConfig& a = cfg.agent_cfg;
        const std::string id = section + "." + key;
        if (id == "run.env") {
            if (value != "fourrooms" && value != "pinball" && value != "mdp-file")
                fail("env must be fourrooms, pinball or mdp-file");
            cfg.env = value;
        } else if (id == "run.agent") {
            if (value != "oc" && value != "sarsa" && value != "ac")
                fail("agent must be oc, sarsa or ac");
            cfg.agent = value;
        } else if (id == "run.mdp_file") {
            cfg.mdp_file = value;
        } else if (id == "run.runs") {
            cfg.runs = static_cast<int>(to_int(value));
            if (cfg.runs < 1) fail("runs must be >= 1");
        } else if (id == "run.episodes") {
            a.episodes = static_cast<int>(to_int(value));
            if (a.episodes < 0) fail("episodes must be >= 0");
        } else if (id == "run.base_seed") {
            a.seed = cfg.base_seed = static_cast<std::uint64_t>(to_int(value));
        } else if (id == "run.output_dir") {
            cfg.output_dir = value;
        } else if (id == "run.checkpoint_every") {
            cfg.checkpoint_every = static_cast<int>(to_int(value));
            if (cfg.checkpoint_every < 0) fail("checkpoint_every must be >= 0");
        } else if (id == "agent.options") {
            a.n_options = static_cast<int>(to_int(value));
            if (a.n_options < 1) fail("options must be >= 1");
        } else if (id == "agent.epsilon") {
            a.epsilon = to_double(value);
            if (a.epsilon < 0.0 || a.epsilon > 1.0) fail("epsilon must be in [0,1]");
        } else if (id == "agent.temperature") {
            a.temperature = to_double(value);
            if (a.temperature <= 0.0) fail("temperature must be > 0");
        } else if (id == "agent.gamma") {
            a.gamma = to_double(value);
            if (a.gamma < 0.0 || a.gamma >= 1.0) fail("gamma must be in [0,1)");
        } else if (id == "agent.lr_critic") {
            a.lr_critic = to_double(value);
            if (a.lr_critic <= 0.0) fail("lr_critic must be > 0");
        } else if (id == "agent.critic") {
            if (value == "qu")
                a.critic_variant = CriticVariant::qu_primary;
            else if (value == "qomega")
                a.critic_variant = CriticVariant::qomega_primary;
            else
                fail("critic must be qu or qomega");
        } else if (id == "agent.vomega") {
            if (value == "greedy")
                a.vomega_mode = VOmegaMode::greedy;
            else if (value == "soft")
                a.vomega_mode = VOmegaMode::epsilon_soft;
            else
                fail("vomega must be greedy or soft");
        } else if (id == "agent.init_scale") {
            a.init_scale = to_double(value);
            if (a.init_scale < 0.0) fail("init_scale must be >= 0");
        } else if (id == "agent.max_steps") {
            cfg.max_steps_override = static_cast<int>(to_int(value));
            if (cfg.max_steps_override < 1) fail("max_steps must be >= 1");
        } else if (id == "actor.lr_intra") {
            a.actor.lr_intra = to_double(value);
            if (a.actor.lr_intra < 0.0) fail("lr_intra must be >= 0");
        } else if (id == "actor.lr_term") {
            a.actor.lr_term = to_double(value);
            if (a.actor.lr_term < 0.0) fail("lr_term must be >= 0");
        } else if (id == "actor.baseline") {
            a.actor.use_baseline = to_flag(value);
        } else if (id == "actor.xi") {
            a.actor.xi = to_double(value);
            if (a.actor.xi < 0.0) fail("xi must be >= 0");
        } else if (id == "actor.entropy") {
            a.actor.entropy_coeff = to_double(value);
            if (a.actor.entropy_coeff < 0.0) fail("entropy must be >= 0");
        } else if (id == "fourrooms.relocation_episode") {
            cfg.relocation_episode = static_cast<int>(to_int(value));
        } else if (id == "pinball.maze") {
            cfg.pinball_maze = value;
        } else if (id == "pinball.fourier_order") {
            cfg.fourier_order = static_cast<int>(to_int(value));
            if (cfg.fourier_order < 0) fail("fourier_order must be >= 0");
        } else if (id == "pinball.fourier_scaling") {
            a.fourier_lr_scaling = to_flag(value);
        } else if (id == "pinball.substeps") {
            cfg.pinball_substeps = static_cast<int>(to_int(value));
            if (cfg.pinball_substeps < 1) fail("substeps must be >= 1");
        } else if (id == "pinball.thrust") {
            cfg.pinball_thrust = to_double(value);
            if (cfg.pinball_thrust <= 0.0) fail("thrust must be > 0");
        } else if (id == "pinball.drag") {
            cfg.pinball_drag = to_double(value);
            if (cfg.pinball_drag <= 0.0 || cfg.pinball_drag > 1.0)
                fail("drag must be in (0,1]");
        } else {
            fail("unknown key '" + key + "' in [" + section + "]");
        }
    }
};

}  // namespace

RunConfig parse_config(std::istream& in) {
    Parser p;
    static const std::map<std::string, int> sections{
        {"run", 0}, {"agent", 0}, {"actor", 0}, {"fourrooms", 0}, {"pinball", 0}};
    std::string section = "run";
    std::string raw;
    while (std::getline(in, raw)) {
        ++p.line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') p.fail("unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!sections.count(section)) p.fail("unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) p.fail("expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) p.fail("empty key");
        if (value.empty()) p.fail("empty value for '" + key + "'");
        p.set(section, key, value);
    }
    if (p.cfg.env == "mdp-file" && p.cfg.mdp_file.empty()) {
        p.line = 0;
        p.fail("env = mdp-file requires run.mdp_file");
    }
    return p.cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "cannot open config file: " + path);
    return parse_config(in);
}

}  // namespace oc
