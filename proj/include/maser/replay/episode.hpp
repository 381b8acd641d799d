#pragma once

#include "maser/nn/tape.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace maser::replay {

using nn::Matrix;

/// One fixed-length trajectory, the unit of replay.
///
/// Every sequence has `length` rows (the episode limit). Steps after
/// termination are padding: zero observations and states, zero reward,
/// `valid = 0`, and only the no-op action (index 0) available and taken.
/// Recurrent consumers start from a zero hidden state at t = 0.
struct Episode {
    int n_agents = 0;
    int n_actions = 0;
    int obs_dim = 0;
    int state_dim = 0;
    int length = 0;

    /// [agent] -> length x obs_dim
    std::vector<Matrix> observations;
    /// [agent] -> length x n_actions, 1 where the action was available
    std::vector<Matrix> available;
    /// [agent][t]
    std::vector<std::vector<int>> actions;
    /// length x state_dim
    Matrix states;
    std::vector<double> rewards;
    std::vector<std::uint8_t> done;
    std::vector<std::uint8_t> valid;
    bool won = false;

    static Episode empty(int n_agents, int n_actions, int obs_dim, int state_dim, int length);

    /// Number of leading valid steps.
    int valid_steps() const;
    double total_reward() const;

    /// Throws ConfigError describing the first broken invariant.
    void validate() const;

    friend bool operator==(const Episode&, const Episode&) = default;
};

// Episode log, one line per timestep (valid steps only):
//
//   t=<t> r=<reward> done=<0|1> a=<a_0>,<a_1>,... o<i>=<v>,<v>,... (one o-field per agent)
//
// preceded by a header line
//
//   # episode agents=<N> actions=<|U|> obs_dim=<d> length=<T> won=<0|1>
//
// Values use 17 significant digits.
void write_episode_log(std::ostream& out, const Episode& episode);

} // namespace maser::replay
