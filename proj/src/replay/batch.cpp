#include "maser/replay/batch.hpp"

#include "maser/errors.hpp"

#include <algorithm>

namespace maser::replay {

Batch make_batch(std::span<const EpisodePtr> episodes) {
    if (episodes.empty()) {
        throw ConfigError("make_batch: no episodes");
    }
    Batch b;
    b.episodes.assign(episodes.begin(), episodes.end());
    b.size = static_cast<int>(episodes.size());
    const Episode& first = *episodes.front();
    b.n_agents = first.n_agents;
    b.n_actions = first.n_actions;
    for (const EpisodePtr& e : episodes) {
        if (e->n_agents != first.n_agents || e->n_actions != first.n_actions || e->obs_dim != first.obs_dim ||
            e->state_dim != first.state_dim) {
            throw ConfigError("make_batch: episodes with different shapes");
        }
        b.valid_steps.push_back(e->valid_steps());
        b.steps = std::max(b.steps, b.valid_steps.back());
    }
    const int rows = b.rows();
    b.valid = Matrix::Zero(rows, 1);
    b.done = Matrix::Zero(rows, 1);
    b.rewards = Matrix::Zero(rows, 1);
    b.states = Matrix::Zero(rows, first.state_dim);
    b.actions.assign(b.n_agents, std::vector<int>(rows, 0));
    b.available.assign(b.n_agents, Matrix::Zero(rows, b.n_actions));
    for (int m = 0; m < b.size; ++m) {
        const Episode& e = *episodes[m];
        for (int t = 0; t < b.steps; ++t) {
            const int r = b.row(t, m);
            b.valid(r, 0) = e.valid[t];
            b.done(r, 0) = e.done[t];
            b.rewards(r, 0) = e.rewards[t];
            b.states.row(r) = e.states.row(t);
            for (int i = 0; i < b.n_agents; ++i) {
                b.actions[i][r] = e.actions[i][t];
                b.available[i].row(r) = e.available[i].row(t);
            }
        }
    }
    return b;
}

} // namespace maser::replay
