#include "maser/subgoal/subgoal.hpp"

#include "maser/agents/policy.hpp"
#include "maser/errors.hpp"
#include "maser/replay/batch.hpp"

#include <iomanip>
#include <limits>
#include <ostream>

namespace maser::subgoal {

BlockSnapshot::BlockSnapshot(const ParamSet& params, long long block)
    : block_(block), n_agents_(params.n_agents()), agent_id_slots_(params.agent_id_slots()), shared_(params.shared()),
      utility_(params.utility), mixer_(params.mixer) {}

std::vector<EpisodeValues> evaluate(BlockSnapshot& snapshot, std::span<const replay::EpisodePtr> episodes) {
    const replay::Batch batch = replay::make_batch(episodes);
    const int n = snapshot.n_agents();
    if (batch.n_agents != n) {
        throw ConfigError("snapshot has " + std::to_string(n) + " agents, episodes have " +
                          std::to_string(batch.n_agents));
    }
    nn::Tape tape(nn::Tape::Mode::kInference);
    std::vector<Matrix> q(n);
    Matrix taken(batch.rows(), n);
    Matrix max_q(batch.rows(), n);
    for (int i = 0; i < n; ++i) {
        const Matrix inputs = agents::agent_inputs(batch.episodes, i, batch.steps, snapshot.agent_id_slots());
        q[i] = snapshot.utility_for(i).unroll(tape, inputs, batch.size).value();
        max_q.col(i) = agents::masked_max(q[i], batch.available[i]);
        for (int r = 0; r < batch.rows(); ++r) {
            taken(r, i) = q[i](r, batch.actions[i][r]);
        }
    }
    const Matrix q_tot = snapshot.mixer().mix(tape, tape.constant(taken), tape.constant(batch.states)).value();

    std::vector<EpisodeValues> out(batch.size);
    for (int b = 0; b < batch.size; ++b) {
        EpisodeValues& v = out[b];
        v.valid_steps = batch.valid_steps[b];
        v.q.assign(n, Matrix(v.valid_steps, batch.n_actions));
        v.max_q.resize(v.valid_steps, n);
        v.q_tot.resize(v.valid_steps);
        for (int t = 0; t < v.valid_steps; ++t) {
            const int r = batch.row(t, b);
            for (int i = 0; i < n; ++i) {
                v.q[i].row(t) = q[i].row(r);
            }
            v.max_q.row(t) = max_q.row(r);
            v.q_tot[t] = q_tot(r, 0);
        }
    }
    return out;
}

EpisodeValues evaluate(BlockSnapshot& snapshot, const replay::Episode& episode) {
    const replay::EpisodePtr ptr = std::make_shared<const replay::Episode>(episode);
    return evaluate(snapshot, std::span<const replay::EpisodePtr>(&ptr, 1)).front();
}

double score_timestep(const EpisodeValues& values, int agent, int t, double alpha) {
    if (t < 0 || t >= values.valid_steps) {
        throw UsageError("score_timestep: t=" + std::to_string(t) + " outside the valid steps");
    }
    const double n = static_cast<double>(values.max_q.cols());
    return alpha * values.max_q(t, agent) + (1.0 - alpha) * (values.q_tot[t] / n);
}

double score_timestep(BlockSnapshot& snapshot, const replay::Episode& episode, int agent, int t, double alpha) {
    return score_timestep(evaluate(snapshot, episode), agent, t, alpha);
}

SubgoalAssignment select_subgoals(const EpisodeValues& values, const replay::Episode& episode, double alpha,
                                  int episode_id) {
    if (values.valid_steps < 1) {
        throw UsageError("select_subgoals: episode without valid steps");
    }
    SubgoalAssignment a;
    a.episode_id = episode_id;
    const int n = static_cast<int>(values.max_q.cols());
    for (int i = 0; i < n; ++i) {
        int best_t = 0;
        double best = score_timestep(values, i, 0, alpha);
        for (int t = 1; t < values.valid_steps; ++t) {
            const double s = score_timestep(values, i, t, alpha);
            if (s > best) {
                best = s;
                best_t = t;
            }
        }
        a.t_star.push_back(best_t);
        a.goal_obs.push_back(episode.observations[i].row(best_t));
    }
    return a;
}

SubgoalAssignment select_subgoals(BlockSnapshot& snapshot, const replay::Episode& episode, double alpha,
                                  int episode_id) {
    return select_subgoals(evaluate(snapshot, episode), episode, alpha, episode_id);
}

SubgoalAssignment select_subgoals_random(const replay::Episode& episode, std::mt19937_64& rng, int episode_id) {
    const int valid = episode.valid_steps();
    if (valid < 1) {
        throw UsageError("select_subgoals_random: episode without valid steps");
    }
    std::uniform_int_distribution<int> pick(0, valid - 1);
    SubgoalAssignment a;
    a.episode_id = episode_id;
    for (int i = 0; i < episode.n_agents; ++i) {
        const int t = pick(rng);
        a.t_star.push_back(t);
        a.goal_obs.push_back(episode.observations[i].row(t));
    }
    return a;
}

void write_subgoal_diagnostics(std::ostream& out, long long block, const SubgoalAssignment& assignment,
                               const EpisodeValues& values, double alpha) {
    const auto old_precision = out.precision(10);
    for (std::size_t i = 0; i < assignment.t_star.size(); ++i) {
        out << "block=" << block << " episode=" << assignment.episode_id << " agent=" << i
            << " t_star=" << assignment.t_star[i] << " scores=";
        for (int t = 0; t < values.valid_steps; ++t) {
            out << (t ? "," : "") << score_timestep(values, static_cast<int>(i), t, alpha);
        }
        out << '\n';
    }
    out.precision(old_precision);
}

} // namespace maser::subgoal
