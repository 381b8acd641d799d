#pragma once

#include "maser/replay/replay_buffer.hpp"

#include <span>
#include <vector>

namespace maser::replay {

/// A set of episodes laid out time-major for batched unrolling: row
/// t * size + b holds step t of episode b. Only the first `steps` steps are
/// kept, where `steps` is the longest valid prefix in the set; shorter
/// episodes contribute padding rows with valid = 0.
struct Batch {
    std::vector<EpisodePtr> episodes;
    int steps = 0;
    int size = 0;
    int n_agents = 0;
    int n_actions = 0;

    Matrix valid;   // rows x 1
    Matrix done;    // rows x 1
    Matrix rewards; // rows x 1, extrinsic
    Matrix states;  // rows x state_dim
    /// [agent] rows
    std::vector<std::vector<int>> actions;
    /// [agent] rows x n_actions
    std::vector<Matrix> available;
    /// per episode
    std::vector<int> valid_steps;

    int rows() const { return steps * size; }
    int row(int t, int b) const { return t * size + b; }
};

Batch make_batch(std::span<const EpisodePtr> episodes);

} // namespace maser::replay
