#include "maser/agents/utility_net.hpp"

#include "maser/errors.hpp"

#include <algorithm>

namespace maser::agents {

UtilityNet::UtilityNet(const std::string& name, int input_dim, int hidden, int n_actions, nn::Rng& rng)
    : fc1_(name + ".fc1", input_dim, hidden, rng), gru_(name + ".gru", hidden, hidden, rng),
      fc2_(name + ".fc2", hidden, n_actions, rng) {}

Var UtilityNet::unroll(Tape& tape, const Matrix& inputs, int batch) {
    if (batch < 1 || inputs.rows() % batch != 0 || inputs.rows() == 0) {
        throw ConfigError("utility net: " + std::to_string(inputs.rows()) + " input rows is not a multiple of batch " +
                          std::to_string(batch));
    }
    const Eigen::Index steps = inputs.rows() / batch;
    const Var embedded = nn::relu(fc1_.forward(tape, tape.constant(inputs)));
    const Var projected = gru_.input_projection(tape, embedded);
    Var h = tape.constant(Matrix::Zero(batch, gru_.hidden_size()));
    std::vector<Var> hidden;
    hidden.reserve(steps);
    for (Eigen::Index t = 0; t < steps; ++t) {
        h = gru_.step(tape, nn::rows(projected, t * batch, batch), h);
        hidden.push_back(h);
    }
    return fc2_.forward(tape, nn::vstack(hidden));
}

Matrix UtilityNet::step(const Matrix& inputs, Matrix& hidden) {
    if (hidden.rows() != inputs.rows() || hidden.cols() != gru_.hidden_size()) {
        throw ConfigError("utility net: hidden state shape does not match the inputs");
    }
    Tape tape(Tape::Mode::kInference);
    const Var embedded = nn::relu(fc1_.forward(tape, tape.constant(inputs)));
    const Var h = gru_.forward(tape, embedded, tape.constant(hidden));
    hidden = h.value();
    return fc2_.forward(tape, h).value();
}

std::vector<nn::Parameter*> UtilityNet::parameters() {
    std::vector<nn::Parameter*> out = fc1_.parameters();
    for (nn::Parameter* p : gru_.parameters()) {
        out.push_back(p);
    }
    for (nn::Parameter* p : fc2_.parameters()) {
        out.push_back(p);
    }
    return out;
}

std::vector<const nn::Parameter*> UtilityNet::parameters() const {
    std::vector<const nn::Parameter*> out = fc1_.parameters();
    for (const nn::Parameter* p : gru_.parameters()) {
        out.push_back(p);
    }
    for (const nn::Parameter* p : fc2_.parameters()) {
        out.push_back(p);
    }
    return out;
}

QVector local_q(UtilityNet& net, const Matrix& history) {
    if (history.rows() == 0) {
        throw ConfigError("local_q needs a non-empty history");
    }
    Tape tape(Tape::Mode::kInference);
    const Var q = net.unroll(tape, history, 1);
    return q.value().bottomRows(1);
}

Matrix agent_inputs(std::span<const replay::EpisodePtr> batch, int agent, int steps, int agent_id_slots) {
    if (batch.empty()) {
        throw ConfigError("agent_inputs: empty batch");
    }
    const int obs_dim = batch.front()->obs_dim;
    const int b_count = static_cast<int>(batch.size());
    Matrix x = Matrix::Zero(static_cast<Eigen::Index>(steps) * b_count, obs_dim + agent_id_slots);
    for (int b = 0; b < b_count; ++b) {
        const replay::Episode& e = *batch[b];
        if (e.obs_dim != obs_dim || steps > e.length || agent >= e.n_agents) {
            throw ConfigError("agent_inputs: episode shape mismatch");
        }
        for (int t = 0; t < steps; ++t) {
            auto row = x.row(static_cast<Eigen::Index>(t) * b_count + b);
            row.head(obs_dim) = e.observations[agent].row(t);
            if (agent_id_slots > 0) {
                row(obs_dim + agent) = 1.0;
            }
        }
    }
    return x;
}

int max_valid_steps(std::span<const replay::EpisodePtr> batch) {
    int steps = 0;
    for (const replay::EpisodePtr& e : batch) {
        steps = std::max(steps, e->valid_steps());
    }
    return steps;
}

} // namespace maser::agents
