#pragma once

#include "maser/env/environment.hpp"
#include "maser/param_set.hpp"
#include "maser/replay/episode.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace maser::train {

/// Plays one episode with decentralized epsilon-greedy execution: each agent
/// acts from its own utility network and observation history; the mixer is
/// not involved. Consumes `rng` only for exploration draws.
replay::Episode rollout(ParamSet& params, env::Environment& env, std::uint64_t env_seed, double epsilon,
                        std::mt19937_64& rng);

/// Joint action for the environment's current state.
using JointPolicy = std::function<std::vector<int>(const env::Environment&)>;

/// Greedy decentralized policy read from `params`. The returned callable keeps
/// per-agent hidden states and must see the episode from its first step; call
/// it afresh for each episode.
JointPolicy greedy_policy(ParamSet& params);

/// Fraction of won episodes, reset with seeds drawn from mt19937_64(seed).
double evaluate_policy(const std::function<JointPolicy()>& make_policy, env::Environment& env, int episodes,
                       std::uint64_t seed);
double evaluate_policy(ParamSet& params, env::Environment& env, int episodes, std::uint64_t seed);

} // namespace maser::train
