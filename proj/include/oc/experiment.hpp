#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "oc/agent.hpp"
#include "oc/checkpoint.hpp"
#include "oc/config.hpp"
#include "oc/env.hpp"
#include "oc/oracle.hpp"

namespace oc {

/// Environment instance plus the feature map the agent trains over.
struct EnvBundle {
    std::unique_ptr<Env> env;
    FeatureMap features;
    int max_steps = 0;
};

EnvBundle make_env(const RunConfig& cfg);

struct SingleRun {
    std::vector<EpisodeLog> logs;
    Checkpoint final_state;
    // (episode, checkpoint) snapshots when checkpoint_every > 0
    std::vector<std::pair<int, Checkpoint>> snapshots;
};

/// One seeded training run (seed = base_seed + run_index) of the configured
/// agent variant.
SingleRun execute_run(const RunConfig& cfg, int run_index);

/// All runs, fanned out over a worker pool. Results are deterministic and
/// independent of the job count.
std::vector<SingleRun> execute_all(const RunConfig& cfg, int jobs);

void write_run_csv(const std::vector<EpisodeLog>& logs, std::ostream& out);
void write_mean_csv(const std::vector<SingleRun>& runs, std::ostream& out);

/// Per option, beta over the 13x13 four-rooms grid; walls emit -1.
/// Rows: option,row,col,beta. Requires a fourrooms checkpoint.
void write_heatmap_csv(const Checkpoint& ckpt, std::ostream& out);

Checkpoint agent_checkpoint(const RunConfig& cfg, const OptionAgent& agent,
                            const FeatureMap& features);
/// Restores parameters into a freshly built agent; dimension or metadata
/// mismatches against the config throw ConfigError.
void restore_agent(const Checkpoint& ckpt, const RunConfig& cfg, OptionAgent& agent);

/// train: runs, CSVs (run_<k>.csv, mean.csv), checkpoints (run_<k>.ckpt).
/// Returns a process exit code (0 ok, 3 divergence abort).
int cmd_train(const RunConfig& cfg, int jobs, std::ostream& out, std::ostream& err);

/// eval: restore a checkpoint, run with all learning rates zeroed, write
/// eval_run_<k>.csv and eval_mean.csv.
int cmd_eval(const RunConfig& cfg, const std::string& checkpoint_path, int jobs,
             std::ostream& out, std::ostream& err);

void print_verify_report(const VerifyReport& report, std::ostream& out);

}  // namespace oc
