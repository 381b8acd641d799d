#include "maser/train/losses.hpp"

#include "maser/agents/policy.hpp"
#include "maser/errors.hpp"

#include <cmath>

namespace maser::train {

BatchForward forward_batch(Tape& tape, ParamSet& params, const replay::Batch& batch, bool with_repr) {
    const int n = batch.n_agents;
    const int rows = batch.rows();
    if (n != params.n_agents()) {
        throw ConfigError("forward_batch: batch and parameters disagree on the agent count");
    }
    BatchForward f;
    f.batch = &batch;

    f.mean_weights = Matrix::Zero(rows, 1);
    for (int t = 0; t < batch.steps; ++t) {
        for (int b = 0; b < batch.size; ++b) {
            const int r = batch.row(t, b);
            f.mean_weights(r, 0) = batch.valid(r, 0) / static_cast<double>(batch.valid_steps[b]);
        }
    }

    Tape target_tape(Tape::Mode::kInference);
    Matrix next_max_all = Matrix::Zero(rows, n);
    const int shift = batch.size;
    for (int i = 0; i < n; ++i) {
        const Matrix inputs = agents::agent_inputs(batch.episodes, i, batch.steps, params.agent_id_slots());
        const Var q = params.utility_for(i).unroll(tape, inputs, batch.size);
        f.q.push_back(q);
        f.q_taken.push_back(nn::pick(q, batch.actions[i]));

        const Matrix target_q = params.target_utility_for(i).unroll(target_tape, inputs, batch.size).value();
        const Matrix target_max = agents::masked_max(target_q, batch.available[i]);
        Matrix next = Matrix::Zero(rows, 1);
        next.topRows(rows - shift) = target_max.bottomRows(rows - shift);
        next_max_all.col(i) = next.col(0);
        f.target_next_max.push_back(std::move(next));
    }
    f.q_tot = params.mixer.mix(tape, nn::hstack(f.q_taken), tape.constant(batch.states));

    Matrix next_states = Matrix::Zero(rows, batch.states.cols());
    next_states.topRows(rows - shift) = batch.states.bottomRows(rows - shift);
    f.target_next_q_tot =
        params.target_mixer.mix(target_tape, target_tape.constant(next_max_all), target_tape.constant(next_states))
            .value();
    // Rows whose successor is missing never bootstrap, but keep them exactly zero.
    f.target_next_q_tot.bottomRows(shift).setZero();

    if (with_repr) {
        for (int i = 0; i < n; ++i) {
            Matrix obs(rows, batch.episodes.front()->obs_dim);
            for (int t = 0; t < batch.steps; ++t) {
                for (int b = 0; b < batch.size; ++b) {
                    obs.row(batch.row(t, b)) = batch.episodes[b]->observations[i].row(t);
                }
            }
            f.phi.push_back(params.repr[i].forward(tape, tape.constant(std::move(obs))));
        }
    }
    return f;
}

subgoal::EpisodeValues episode_values(const BatchForward& fwd, int b) {
    const replay::Batch& batch = *fwd.batch;
    const int n = batch.n_agents;
    subgoal::EpisodeValues v;
    v.valid_steps = batch.valid_steps[b];
    v.q.assign(n, Matrix(v.valid_steps, batch.n_actions));
    v.max_q.resize(v.valid_steps, n);
    v.q_tot.resize(v.valid_steps);
    for (int t = 0; t < v.valid_steps; ++t) {
        const int r = batch.row(t, b);
        for (int i = 0; i < n; ++i) {
            v.q[i].row(t) = fwd.q[i].value().row(r);
            v.max_q(t, i) = agents::masked_max(fwd.q[i].value().row(r), batch.available[i].row(r))(0, 0);
        }
        v.q_tot[t] = fwd.q_tot.value()(r, 0);
    }
    return v;
}

Matrix td_targets(const Matrix& rewards, const Matrix& done, const Matrix& next, double gamma) {
    if (rewards.rows() != done.rows() || rewards.rows() != next.rows() || rewards.cols() != 1 || done.cols() != 1 ||
        next.cols() != 1) {
        throw ConfigError("td_targets: expected matching rows x 1 columns");
    }
    return (rewards.array() + gamma * (1.0 - done.array()) * next.array()).matrix();
}

Var weighted_td_loss(const Var& q, const Matrix& targets, const Matrix& weights) {
    Tape& tape = q.tape();
    const Var err = nn::sub(tape.constant(targets), q);
    return nn::sum(nn::mul(nn::square(err), tape.constant(weights)));
}

Var individual_td_loss(const BatchForward& fwd, int agent, const Matrix& rewards, double gamma) {
    const Matrix y = td_targets(rewards, fwd.batch->done, fwd.target_next_max[agent], gamma);
    return weighted_td_loss(fwd.q_taken[agent], y, fwd.mean_weights);
}

Var total_td_loss(const BatchForward& fwd, const Matrix& proxy, double gamma) {
    const Matrix y = td_targets(proxy, fwd.batch->done, fwd.target_next_q_tot, gamma);
    return weighted_td_loss(fwd.q_tot, y, fwd.mean_weights);
}

Var entropy_correction_loss(const Var& q, const Matrix& window) {
    return nn::sum(nn::mul(nn::kl_to_uniform_rows(q), q.tape().constant(window)));
}

double kl_to_uniform(const RowVector& q) {
    const double top = q.maxCoeff();
    const double lse = top + std::log((q.array() - top).exp().sum());
    const auto log_p = q.array() - lse;
    return (log_p.exp() * log_p).sum() + std::log(static_cast<double>(q.size()));
}

Var composite_loss(const LossTerms& terms, const LossWeights& weights) {
    if (!terms.l_td.valid()) {
        throw ConfigError("composite_loss: the total TD term is required");
    }
    Var total = terms.l_td;
    auto add_group = [&](const std::vector<Var>& group, double w) {
        if (w == 0.0) {
            return;
        }
        for (const Var& term : group) {
            if (term.valid()) {
                total = nn::add(total, nn::scale(term, w));
            }
        }
    };
    add_group(terms.l_i, weights.lambda_i);
    add_group(terms.l_e, weights.lambda_e);
    add_group(terms.l_d, weights.lambda_d);
    return total;
}

double composite_loss(double l_td, std::span<const double> l_i, std::span<const double> l_e,
                      std::span<const double> l_d, const LossWeights& weights) {
    double total = l_td;
    for (double v : l_i) {
        total += weights.lambda_i * v;
    }
    for (double v : l_e) {
        total += weights.lambda_e * v;
    }
    for (double v : l_d) {
        total += weights.lambda_d * v;
    }
    return total;
}

} // namespace maser::train
