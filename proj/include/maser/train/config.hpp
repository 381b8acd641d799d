#pragma once

#include "maser/agents/policy.hpp"
#include "maser/env/skirmish.hpp"
#include "maser/nn/optim.hpp"
#include "maser/param_set.hpp"

#include <cstdint>
#include <string>

namespace maser::train {

enum class SubgoalMode { kMaser, kRandom, kLocalOnly, kTotalOnly };
enum class CorrectionMode { kNormal, kNone, kOver };

std::string to_string(SubgoalMode mode);
std::string to_string(CorrectionMode mode);
SubgoalMode subgoal_mode_from_string(const std::string& s);
CorrectionMode correction_mode_from_string(const std::string& s);

struct TrainConfig {
    double alpha = 0.5;
    double lambda = 0.03;
    double lambda_i = 0.001;
    double lambda_e = 0.001;
    double lambda_d = 0.001;
    double gamma = 0.99;
    nn::RmsPropOptions optim;
    /// Joint gradient-norm bound; 0 disables clipping.
    double grad_clip = 10.0;

    int buffer_capacity = 5000;
    int batch_size = 32;
    /// Collected episodes between target syncs.
    int target_interval = 200;
    agents::EpsilonSchedule epsilon;

    SubgoalMode subgoal_mode = SubgoalMode::kMaser;
    CorrectionMode correction = CorrectionMode::kNormal;
    bool disable_li = false;
    bool disable_repr = false;

    std::string env = "skirmish-2v2";
    env::RewardMode reward_mode = env::RewardMode::kSparse;
    long long max_env_steps = 300000;
    std::uint64_t seed = 1;

    /// Collected episodes between greedy evaluations; 0 disables them.
    int eval_interval = 100;
    int eval_episodes = 32;
    /// Collected episodes between checkpoints; 0 keeps only the final one.
    int checkpoint_interval = 0;

    NetworkDims dims;
    bool share_params = false;

    /// Throws ConfigError naming the violated constraint.
    void validate() const;

    /// Subgoal weighting after applying the local_only / total_only presets.
    double effective_alpha() const;
    double effective_lambda_i() const { return disable_li ? 0.0 : lambda_i; }
    double effective_lambda_e() const { return correction == CorrectionMode::kNone ? 0.0 : lambda_e; }
    double effective_lambda_d() const { return disable_repr ? 0.0 : lambda_d; }
    /// True when every term beyond the total TD loss is switched off and the
    /// proxy reward equals the extrinsic reward.
    bool is_qmix_reduction() const;
};

} // namespace maser::train
