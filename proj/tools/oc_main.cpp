#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "oc/experiment.hpp"

namespace {

// OC_OUTPUT_DIR overrides the configured output directory
void apply_output_override(oc::RunConfig& cfg) {
    if (const char* dir = std::getenv("OC_OUTPUT_DIR"); dir && *dir) cfg.output_dir = dir;
}

oc::RunConfig load_config_or_exit(const std::string& path) {
    try {
        oc::RunConfig cfg = oc::parse_config_file(path);
        apply_output_override(cfg);
        return cfg;
    } catch (const oc::ConfigError& e) {
        if (e.line > 0)
            std::cerr << path << ":" << e.line << ": " << e.what() << "\n";
        else
            std::cerr << path << ": " << e.what() << "\n";
        std::exit(2);
    } catch (const std::exception& e) {
        std::cerr << path << ": " << e.what() << "\n";
        std::exit(2);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"option-critic experiments"};
    app.require_subcommand(1);

    std::string config_path, checkpoint_path, heatmap_out;
    int jobs = 1;

    CLI::App* train = app.add_subcommand("train", "run seeded training runs from a config file");
    train->add_option("config", config_path, "config file")->required();
    train->add_option("--jobs", jobs, "worker pool size")->check(CLI::PositiveNumber);

    CLI::App* heatmap =
        app.add_subcommand("heatmap", "emit per-option termination probabilities as CSV");
    heatmap->add_option("checkpoint", checkpoint_path, "fourrooms checkpoint")->required();
    heatmap->add_option("-o,--output", heatmap_out, "output file (default stdout)");

    int verify_instances = 20;
    int verify_states = 5, verify_actions = 3, verify_options = 3;
    std::uint64_t verify_seed = 7;
    bool corrupt = false;
    CLI::App* verify = app.add_subcommand("verify", "run the oracle property battery");
    verify->add_option("--instances", verify_instances)->check(CLI::PositiveNumber);
    verify->add_option("--seed", verify_seed);
    verify->add_option("--max-states", verify_states)->check(CLI::PositiveNumber);
    verify->add_option("--max-actions", verify_actions)->check(CLI::PositiveNumber);
    verify->add_option("--max-options", verify_options)->check(CLI::PositiveNumber);
    verify->add_flag("--corrupt-gradient", corrupt)->group("");  // test hook

    CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint without learning");
    eval->add_option("checkpoint", checkpoint_path, "checkpoint file")->required();
    eval->add_option("config", config_path, "config file")->required();
    eval->add_option("--jobs", jobs)->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (train->parsed()) {
            const oc::RunConfig cfg = load_config_or_exit(config_path);
            return oc::cmd_train(cfg, jobs, std::cout, std::cerr);
        }
        if (heatmap->parsed()) {
            const oc::Checkpoint ckpt = oc::load_checkpoint_file(checkpoint_path);
            if (heatmap_out.empty()) {
                oc::write_heatmap_csv(ckpt, std::cout);
            } else {
                std::ofstream out(heatmap_out);
                if (!out) {
                    std::cerr << "cannot write " << heatmap_out << "\n";
                    return 2;
                }
                oc::write_heatmap_csv(ckpt, out);
            }
            return 0;
        }
        if (verify->parsed()) {
            oc::VerifyOptions opts;
            opts.instances = verify_instances;
            opts.seed = verify_seed;
            opts.max_states = verify_states;
            opts.max_actions = verify_actions;
            opts.max_options = verify_options;
            opts.corrupt_gradient = corrupt;
            const oc::VerifyReport report = oc::run_verify(opts);
            oc::print_verify_report(report, std::cout);
            if (!report.pass) {
                const char* dir = std::getenv("OC_OUTPUT_DIR");
                const std::filesystem::path replay =
                    std::filesystem::path(dir && *dir ? dir : ".") / "verify_failure.mdp";
                if (replay.has_parent_path())
                    std::filesystem::create_directories(replay.parent_path());
                std::ofstream out(replay);
                out << report.failing_mdp_text;
                std::cerr << "first failing instance " << report.failing_index
                          << " written to " << replay.string() << " (instance seed "
                          << report.instances[report.failing_index].seed << ")\n";
                return 1;
            }
            return 0;
        }
        if (eval->parsed()) {
            const oc::RunConfig cfg = load_config_or_exit(config_path);
            return oc::cmd_eval(cfg, checkpoint_path, jobs, std::cout, std::cerr);
        }
    } catch (const oc::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const oc::DivergenceError& e) {
        std::cerr << "aborted: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
