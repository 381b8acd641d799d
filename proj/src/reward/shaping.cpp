#include "maser/reward/shaping.hpp"

#include "maser/errors.hpp"

#include <algorithm>
#include <cmath>

namespace maser::reward {

double actionable_distance(const RowVector& qa, const RowVector& qb) {
    if (qa.size() != qb.size()) {
        throw ConfigError("actionable_distance: vectors of different length");
    }
    const double na = qa.norm();
    const double nb = qb.norm();
    if (na == 0.0 || nb == 0.0) {
        return 1.0;
    }
    const double cosine = std::clamp(qa.dot(qb) / (na * nb), -1.0, 1.0);
    return 1.0 - cosine;
}

double actionable_distance(subgoal::BlockSnapshot& snapshot, int agent, const RowVector& obs_a,
                           const RowVector& obs_b) {
    auto one_step = [&](const RowVector& obs) {
        Matrix input = Matrix::Zero(1, obs.size() + snapshot.agent_id_slots());
        input.row(0).head(obs.size()) = obs;
        if (snapshot.agent_id_slots() > 0) {
            input(0, obs.size() + agent) = 1.0;
        }
        return agents::local_q(snapshot.utility_for(agent), input);
    };
    return actionable_distance(one_step(obs_a), one_step(obs_b));
}

double intrinsic_reward(ReprNet& repr, const RowVector& obs, const RowVector& goal) {
    Matrix both(2, obs.size());
    both.row(0) = obs;
    both.row(1) = goal;
    const Matrix phi = repr.embed(both);
    return -(phi.row(0) - phi.row(1)).norm();
}

double proxy_reward(double r_ex, std::span<const double> intrinsics, double lambda) {
    if (intrinsics.empty()) {
        throw ConfigError("proxy_reward: no agents");
    }
    double total = 0.0;
    for (double r : intrinsics) {
        total += r;
    }
    return r_ex + lambda * (total / static_cast<double>(intrinsics.size()));
}

std::vector<double> credit_weights(std::span<const double> max_q) {
    if (max_q.empty()) {
        throw ConfigError("credit_weights: no agents");
    }
    const double top = *std::max_element(max_q.begin(), max_q.end());
    std::vector<double> w(max_q.size());
    double total = 0.0;
    for (std::size_t i = 0; i < max_q.size(); ++i) {
        w[i] = std::exp(max_q[i] - top);
        total += w[i];
    }
    for (double& v : w) {
        v /= total;
    }
    return w;
}

std::vector<double> individual_rewards(std::span<const double> credit, double proxy,
                                       std::span<const double> intrinsics, double lambda) {
    if (credit.size() != intrinsics.size()) {
        throw ConfigError("individual_rewards: credit and intrinsic counts differ");
    }
    std::vector<double> r(credit.size());
    for (std::size_t i = 0; i < credit.size(); ++i) {
        r[i] = credit[i] * proxy + lambda * intrinsics[i];
    }
    return r;
}

Var distance_regression_loss(const Var& embeddings, std::span<const int> goal_row, const Matrix& targets,
                             const Matrix& weights) {
    nn::Tape& tape = embeddings.tape();
    const Var goals = nn::gather_rows(embeddings, goal_row);
    const Var dist = nn::row_norm(nn::sub(embeddings, goals));
    const Var err = nn::sub(dist, tape.constant(targets));
    return nn::sum(nn::mul(nn::square(err), tape.constant(weights)));
}

double repr_loss(ReprNet& repr, const Matrix& obs, const Matrix& goals, std::span<const double> targets) {
    const Eigen::Index n = obs.rows();
    if (goals.rows() != n || static_cast<Eigen::Index>(targets.size()) != n || n == 0) {
        throw ConfigError("repr_loss: need one goal and one target per observation");
    }
    Matrix stacked(2 * n, obs.cols());
    stacked.topRows(n) = obs;
    stacked.bottomRows(n) = goals;
    std::vector<int> goal_row(2 * n);
    Matrix t = Matrix::Zero(2 * n, 1);
    Matrix w = Matrix::Zero(2 * n, 1);
    for (Eigen::Index k = 0; k < n; ++k) {
        goal_row[k] = static_cast<int>(n + k);
        goal_row[n + k] = static_cast<int>(n + k);
        t(k, 0) = targets[k];
        w(k, 0) = 1.0 / static_cast<double>(n);
    }
    nn::Tape tape(nn::Tape::Mode::kInference);
    return distance_regression_loss(repr.forward(tape, tape.constant(stacked)), goal_row, t, w).scalar();
}

RewardBundle shape_rewards(const replay::Episode& episode, const subgoal::EpisodeValues& values,
                           const subgoal::SubgoalAssignment& assignment, std::vector<ReprNet>* repr, double lambda) {
    const int steps = values.valid_steps;
    const int n = episode.n_agents;
    if (static_cast<int>(assignment.t_star.size()) != n) {
        throw ConfigError("shape_rewards: assignment does not cover every agent");
    }
    RewardBundle out;
    out.intrinsic = Matrix::Zero(steps, n);
    out.individual = Matrix::Zero(steps, n);
    out.credit = Matrix::Zero(steps, n);
    out.distance_targets = Matrix::Zero(steps, n);
    out.proxy.assign(steps, 0.0);

    for (int i = 0; i < n; ++i) {
        const Matrix obs = episode.observations[i].topRows(steps);
        const Matrix phi = repr != nullptr ? (*repr)[i].embed(obs) : obs;
        const int goal_t = assignment.t_star[i];
        if (goal_t < 0 || goal_t >= steps) {
            throw UsageError("shape_rewards: subgoal outside the valid steps");
        }
        const RowVector goal_q = values.q[i].row(goal_t);
        for (int t = 0; t < steps; ++t) {
            out.intrinsic(t, i) = -(phi.row(t) - phi.row(goal_t)).norm();
            out.distance_targets(t, i) = actionable_distance(values.q[i].row(t), goal_q);
        }
    }
    std::vector<double> intrinsics(n);
    std::vector<double> max_q(n);
    for (int t = 0; t < steps; ++t) {
        for (int i = 0; i < n; ++i) {
            intrinsics[i] = out.intrinsic(t, i);
            max_q[i] = values.max_q(t, i);
        }
        out.proxy[t] = proxy_reward(episode.rewards[t], intrinsics, lambda);
        const std::vector<double> credit = credit_weights(max_q);
        const std::vector<double> r = individual_rewards(credit, out.proxy[t], intrinsics, lambda);
        for (int i = 0; i < n; ++i) {
            out.credit(t, i) = credit[i];
            out.individual(t, i) = r[i];
        }
    }
    return out;
}

} // namespace maser::reward
