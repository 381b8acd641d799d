#pragma once

#include "maser/agents/utility_net.hpp"

#include <random>

namespace maser::agents {

/// Linear anneal from `start` to `end` over `anneal_steps` environment steps, then flat.
struct EpsilonSchedule {
    double start = 1.0;
    double end = 0.05;
    long long anneal_steps = 50000;

    double value(long long step) const;
};

/// Highest-valued available action; ties go to the lowest index.
/// Throws UsageError when `mask` has no available action.
int greedy_action(const QVector& q, const RowVector& mask);

/// With probability epsilon a uniform draw over available actions, otherwise
/// greedy_action(). Consumes one uniform draw, plus one index draw when exploring.
int act_epsilon_greedy(const QVector& q, double epsilon, std::mt19937_64& rng, const RowVector& mask);

/// max over available actions for every row of q (rows x n_actions).
Matrix masked_max(const Matrix& q, const Matrix& mask);

} // namespace maser::agents
