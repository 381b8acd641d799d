#pragma once

#include "maser/env/environment.hpp"
#include "maser/nn/tape.hpp"
#include "maser/replay/episode.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace maser::testing {

using nn::Matrix;

/// A well-formed episode with random contents. `valid` in [1, length]; 0 picks
/// a random valid length. Some agents may have actions masked out, as dead
/// agents do.
inline replay::Episode random_episode(std::mt19937_64& rng, int n_agents, int n_actions, int obs_dim, int state_dim,
                                      int length, int valid = 0) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_int_distribution<int> len(1, length);
    if (valid <= 0) {
        valid = len(rng);
    }
    replay::Episode e = replay::Episode::empty(n_agents, n_actions, obs_dim, state_dim, length);
    for (int t = 0; t < valid; ++t) {
        for (int i = 0; i < n_agents; ++i) {
            for (int k = 0; k < obs_dim; ++k) {
                e.observations[i](t, k) = unit(rng);
            }
            const bool dead = unit(rng) > 0.8;
            for (int u = 0; u < n_actions; ++u) {
                e.available[i](t, u) = (u == 0 || !dead) ? 1.0 : 0.0;
            }
            e.actions[i][t] = dead ? 0 : std::uniform_int_distribution<int>(0, n_actions - 1)(rng);
        }
        for (int k = 0; k < state_dim; ++k) {
            e.states(t, k) = unit(rng);
        }
        e.rewards[t] = unit(rng);
        e.valid[t] = 1;
    }
    e.done[valid - 1] = 1;
    return e;
}

/// Symmetric relative error with a floor on the scale.
inline double rel_error(double a, double b, double floor = 1e-5) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

} // namespace maser::testing
