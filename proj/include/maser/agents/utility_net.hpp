#pragma once

#include "maser/nn/layers.hpp"
#include "maser/replay/replay_buffer.hpp"

#include <span>
#include <string>
#include <vector>

namespace maser::agents {

using nn::Matrix;
using nn::RowVector;
using nn::Tape;
using nn::Var;

/// Q^i(o, .) over the action set; one entry per action.
using QVector = RowVector;

/// Recurrent per-agent utility network: affine + ReLU, GRU cell, affine head.
/// Input is the agent's observation (which already carries its last action),
/// optionally followed by an agent-id one-hot when parameters are shared.
class UtilityNet {
public:
    UtilityNet() = default;
    UtilityNet(const std::string& name, int input_dim, int hidden, int n_actions, nn::Rng& rng);

    /// `inputs` stacks `steps` blocks of `batch` rows in time-major order
    /// (row t * batch + b). The hidden state starts at zero. Returns
    /// (steps * batch) x n_actions in the same layout.
    Var unroll(Tape& tape, const Matrix& inputs, int batch);

    /// One recurrent step without recording. `hidden` (B x hidden) is advanced
    /// in place; returns B x n_actions.
    Matrix step(const Matrix& inputs, Matrix& hidden);

    int input_dim() const { return static_cast<int>(fc1_.in_features()); }
    int hidden_dim() const { return static_cast<int>(gru_.hidden_size()); }
    int n_actions() const { return static_cast<int>(fc2_.out_features()); }

    std::vector<nn::Parameter*> parameters();
    std::vector<const nn::Parameter*> parameters() const;

private:
    nn::Linear fc1_;
    nn::GruCell gru_;
    nn::Linear fc2_;
};

/// Q-vector after the last row of `history` (one observation per row, t = 0 first).
QVector local_q(UtilityNet& net, const Matrix& history);

/// Time-major network input for one agent over the first `steps` steps of
/// each episode. With `agent_id_slots > 0` an id one-hot of that width is appended.
Matrix agent_inputs(std::span<const replay::EpisodePtr> batch, int agent, int steps, int agent_id_slots = 0);

/// Longest valid prefix across the batch.
int max_valid_steps(std::span<const replay::EpisodePtr> batch);

} // namespace maser::agents
