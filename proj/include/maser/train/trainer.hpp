#pragma once

#include "maser/env/environment.hpp"
#include "maser/nn/optim.hpp"
#include "maser/param_set.hpp"
#include "maser/replay/replay_buffer.hpp"
#include "maser/train/config.hpp"
#include "maser/train/losses.hpp"

#include <iosfwd>
#include <memory>
#include <random>
#include <vector>

namespace maser::train {

/// Independent random streams of one run, all derived from the run seed, so
/// that switching a feature on or off does not shift the draws of the others.
struct RngStreams {
    explicit RngStreams(std::uint64_t seed);

    std::uint64_t init_seed;
    std::mt19937_64 sampling;
    std::mt19937_64 exploration;
    std::mt19937_64 env_seeds;
    std::mt19937_64 subgoals;
    /// Fixed per run, so every evaluation replays the same episodes.
    std::uint64_t eval_seed;
};

/// Rewards, windows and regression targets for one block, laid out like the
/// batch rows. Everything here is a constant with respect to the gradient.
struct BlockTargets {
    Matrix proxy;                                   // rows x 1
    std::vector<Matrix> individual;                 // [agent] rows x 1
    std::vector<Matrix> correction_window;          // [agent] rows x 1, 0 or 1
    std::vector<Matrix> distance_targets;           // [agent] rows x 1
    std::vector<std::vector<int>> goal_rows;        // [agent] row of the subgoal step
    std::vector<subgoal::SubgoalAssignment> assignments; // [episode], empty when unused
    double mean_proxy = 0.0;
};

/// Builds the block's shaped rewards from the forward values, which were
/// computed with the block-start parameters and so act as the snapshot.
/// With `log` set, writes one subgoal diagnostic line per agent and episode.
BlockTargets compute_block_targets(const BatchForward& fwd, ParamSet& params, const TrainConfig& config,
                                   std::mt19937_64& subgoal_rng, std::ostream* log = nullptr, long long block = 0);

/// Composite loss of one block, ready for backward().
struct BlockLoss {
    Var total;
    LossTerms terms;
};
BlockLoss block_loss(const BatchForward& fwd, const BlockTargets& targets, const TrainConfig& config);

struct BlockReport {
    long long block = 0;
    long long env_steps = 0;
    long long episodes = 0;
    double loss = 0.0;
    double l_td = 0.0;
    double sum_li = 0.0;
    double sum_le = 0.0;
    double sum_ld = 0.0;
    double mean_rt = 0.0;
    double epsilon = 0.0;
    double grad_norm = 0.0;
    bool targets_synced = false;
    /// [episode][agent], empty when no subgoals were drawn.
    std::vector<std::vector<int>> t_star;

    friend bool operator==(const BlockReport&, const BlockReport&) = default;
};

/// Blockwise training loop: each block takes one optimizer step on M replayed
/// episodes and then collects one new episode.
class Trainer {
public:
    Trainer(TrainConfig config, std::unique_ptr<env::Environment> env);

    BlockReport train_block();
    /// Collects one epsilon-greedy episode at the current schedule value.
    void collect_episode();
    /// Greedy decentralized win rate over `episodes` episodes on a copy of the
    /// training environment, always from the same reset seeds.
    double evaluate(int episodes);

    const TrainConfig& config() const { return config_; }
    ParamSet& params() { return params_; }
    replay::ReplayBuffer& buffer() { return buffer_; }
    nn::RmsProp& optimizer() { return optimizer_; }
    RngStreams& rng() { return rng_; }
    env::Environment& environment() { return *env_; }
    long long env_steps() const { return env_steps_; }
    long long episodes() const { return episodes_; }
    long long blocks() const { return blocks_; }
    double epsilon() const { return config_.epsilon.value(env_steps_); }

    /// Receives one subgoal diagnostic line per agent and sampled episode.
    void set_subgoal_log(std::ostream* out) { subgoal_log_ = out; }

private:
    TrainConfig config_;
    std::unique_ptr<env::Environment> env_;
    RngStreams rng_;
    ParamSet params_;
    replay::ReplayBuffer buffer_;
    nn::RmsProp optimizer_;
    long long env_steps_ = 0;
    long long episodes_ = 0;
    long long blocks_ = 0;
    long long syncs_ = 0;
    std::ostream* subgoal_log_ = nullptr;
};

} // namespace maser::train
