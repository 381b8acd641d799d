#pragma once

#include "maser/cli/config_io.hpp"
#include "maser/train/trainer.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace maser::cli {

/// Build version, from `git describe` at configure time.
std::string version_string();

/// Everything needed to rerun a training run bit for bit. Written as
/// manifest.json into the run directory before training starts.
struct RunManifest {
    std::string version;
    train::TrainConfig config;
    env::SkirmishConfig environment;
    std::vector<std::uint64_t> seeds;
    /// Relative paths of the run's outputs, keyed by role.
    nlohmann::json layout;

    nlohmann::json to_json() const;
    static RunManifest from_json(const nlohmann::json& j);
};

// metrics.csv has one row per evaluation plus a final row. Losses and the mean
// proxy reward are averaged over the blocks since the previous row.
inline constexpr const char* kMetricsHeader =
    "env_steps,block,eval_win_rate,L_TD,sum_Li,sum_LE,sum_LD,mean_Rt,epsilon,episodes";

struct TrainOptions {
    bool subgoal_log = false;
    /// Progress lines; null for silence.
    std::ostream* progress = nullptr;
};

struct TrainResult {
    bool ok = true;
    std::string error;
    double final_win_rate = 0.0;
    long long env_steps = 0;
    long long episodes = 0;
    long long blocks = 0;
    double seconds = 0.0;
};

std::unique_ptr<env::Environment> make_environment(const env::SkirmishConfig& config);

/// Trains to the configured step budget inside `out_dir`, writing
/// manifest.json, metrics.csv, checkpoints/ and result.json. A non-finite loss
/// ends the run with ok=false and a failure.txt dump; configuration errors
/// propagate as ConfigError.
TrainResult run_train(const RunSpec& spec, const std::filesystem::path& out_dir, const TrainOptions& options = {});

struct EvalResult {
    double win_rate = 0.0;
    int episodes = 0;
    std::uint64_t seed = 0;
};

/// Greedy evaluation of a checkpoint; the run setup comes from the
/// manifest.json found next to the checkpoint or one directory above it.
EvalResult run_eval(const std::filesystem::path& checkpoint, int episodes);

/// The ablation set, in matrix order.
std::vector<std::string> ablation_variants();
/// `base` with the named variant applied. Throws ConfigError on an unknown name.
train::TrainConfig apply_variant(train::TrainConfig base, const std::string& variant);

struct AblationRow {
    std::string variant;
    std::uint64_t seed = 0;
    TrainResult result;
};

struct AblationAggregate {
    std::string variant;
    int runs_ok = 0;
    int runs_failed = 0;
    double mean = 0.0;
    double std = 0.0;
    double median = 0.0;
};

std::vector<AblationAggregate> aggregate(const std::vector<AblationRow>& rows);

/// summary.csv: one "run" row per (variant, seed), then one "aggregate" row
/// per variant with the mean, population std and median final win rate over
/// the runs that finished.
void write_summary(std::ostream& out, const std::vector<AblationRow>& rows);

struct AblationOptions {
    std::vector<std::string> variants = ablation_variants();
    /// Skip runs whose directory already holds a result.json for the same manifest.
    bool resume = true;
    std::ostream* progress = nullptr;
};

/// Runs every variant for every seed under out_dir/<variant>/seed-<n>/ and
/// writes out_dir/summary.csv. A failed run is recorded and the matrix goes on.
std::vector<AblationRow> run_ablation_matrix(const RunSpec& base, const std::vector<std::uint64_t>& seeds,
                                             const std::filesystem::path& out_dir, const AblationOptions& options);

} // namespace maser::cli
