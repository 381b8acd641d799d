#include "maser/train/config.hpp"

#include "maser/errors.hpp"

#include <cmath>

namespace maser::train {

std::string to_string(SubgoalMode mode) {
    switch (mode) {
    case SubgoalMode::kMaser: return "maser";
    case SubgoalMode::kRandom: return "random";
    case SubgoalMode::kLocalOnly: return "local_only";
    case SubgoalMode::kTotalOnly: return "total_only";
    }
    return "maser";
}

std::string to_string(CorrectionMode mode) {
    switch (mode) {
    case CorrectionMode::kNormal: return "normal";
    case CorrectionMode::kNone: return "none";
    case CorrectionMode::kOver: return "over";
    }
    return "normal";
}

SubgoalMode subgoal_mode_from_string(const std::string& s) {
    if (s == "maser") return SubgoalMode::kMaser;
    if (s == "random") return SubgoalMode::kRandom;
    if (s == "local_only") return SubgoalMode::kLocalOnly;
    if (s == "total_only") return SubgoalMode::kTotalOnly;
    throw ConfigError("subgoal_mode must be one of maser, random, local_only, total_only (got '" + s + "')");
}

CorrectionMode correction_mode_from_string(const std::string& s) {
    if (s == "normal") return CorrectionMode::kNormal;
    if (s == "none") return CorrectionMode::kNone;
    if (s == "over") return CorrectionMode::kOver;
    throw ConfigError("correction must be one of normal, none, over (got '" + s + "')");
}

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) {
        throw ConfigError("invalid config: " + what);
    }
}

bool finite(double x) { return std::isfinite(x); }

} // namespace

void TrainConfig::validate() const {
    require(finite(alpha) && alpha >= 0.0 && alpha <= 1.0, "alpha must lie in [0, 1]");
    require(finite(lambda) && lambda >= 0.0, "lambda must be >= 0");
    require(finite(lambda_i) && lambda_i >= 0.0, "lambda_i must be >= 0");
    require(finite(lambda_e) && lambda_e >= 0.0, "lambda_e must be >= 0");
    require(finite(lambda_d) && lambda_d >= 0.0, "lambda_d must be >= 0");
    require(finite(gamma) && gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1)");
    require(finite(optim.lr) && optim.lr > 0.0, "lr must be > 0");
    require(finite(optim.decay) && optim.decay >= 0.0 && optim.decay < 1.0, "rms_decay must lie in [0, 1)");
    require(finite(optim.eps) && optim.eps > 0.0, "rms_eps must be > 0");
    require(finite(grad_clip) && grad_clip >= 0.0, "grad_clip must be >= 0");
    require(buffer_capacity >= 1, "buffer_capacity must be >= 1");
    require(batch_size >= 1, "batch_size must be >= 1");
    require(target_interval >= 1, "target_interval must be >= 1");
    require(epsilon.start >= 0.0 && epsilon.start <= 1.0, "epsilon_start must lie in [0, 1]");
    require(epsilon.end >= 0.0 && epsilon.end <= 1.0, "epsilon_end must lie in [0, 1]");
    require(epsilon.anneal_steps >= 0, "epsilon_anneal_steps must be >= 0");
    require(max_env_steps >= 1, "max_env_steps must be >= 1");
    require(eval_interval >= 0, "eval_interval must be >= 0");
    require(eval_episodes >= 1, "eval_episodes must be >= 1");
    require(checkpoint_interval >= 0, "checkpoint_interval must be >= 0");
    require(dims.hidden >= 1 && dims.mixer_embed >= 1 && dims.repr_hidden >= 1, "network widths must be >= 1");
    require(!env.empty(), "env must be set");
}

double TrainConfig::effective_alpha() const {
    switch (subgoal_mode) {
    case SubgoalMode::kLocalOnly: return 1.0;
    case SubgoalMode::kTotalOnly: return 0.0;
    default: return alpha;
    }
}

bool TrainConfig::is_qmix_reduction() const {
    return lambda == 0.0 && effective_lambda_i() == 0.0 && effective_lambda_e() == 0.0 &&
           effective_lambda_d() == 0.0;
}

} // namespace maser::train
