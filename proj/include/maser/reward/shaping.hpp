#pragma once

#include "maser/reward/repr_net.hpp"
#include "maser/subgoal/subgoal.hpp"

#include <span>
#include <vector>

namespace maser::reward {

using nn::RowVector;

/// 1 - cos(qa, qb). A zero-norm vector counts as orthogonal (distance 1).
double actionable_distance(const RowVector& qa, const RowVector& qb);

/// Distance between the snapshot Q-vectors of two observations, each read as a
/// one-step history (zero initial hidden state).
double actionable_distance(subgoal::BlockSnapshot& snapshot, int agent, const RowVector& obs_a,
                           const RowVector& obs_b);

/// -||phi(o_t) - phi(o_g)||_2
double intrinsic_reward(ReprNet& repr, const RowVector& obs, const RowVector& goal);

/// r_ex + lambda * mean_i(intrinsic_i)
double proxy_reward(double r_ex, std::span<const double> intrinsics, double lambda);

/// softmax across agents of each agent's max-Q at one timestep.
std::vector<double> credit_weights(std::span<const double> max_q);

/// r^i = credit_i * R + lambda * intrinsic_i
std::vector<double> individual_rewards(std::span<const double> credit, double proxy,
                                       std::span<const double> intrinsics, double lambda);

/// sum_r w_r (||phi_r - phi_goal(r)||_2 - target_r)^2, where phi_goal(r) is row
/// goal_row[r] of the same embedding matrix. `targets` and `weights` are
/// rows x 1 constants.
Var distance_regression_loss(const Var& embeddings, std::span<const int> goal_row, const Matrix& targets,
                             const Matrix& weights);

/// Mean over pairs of (||phi(o_k) - phi(g_k)||_2 - target_k)^2.
double repr_loss(ReprNet& repr, const Matrix& obs, const Matrix& goals, std::span<const double> targets);

/// Shaped rewards for one episode under one subgoal assignment; rows are the
/// episode's valid steps.
struct RewardBundle {
    Matrix intrinsic;        // steps x N, every entry <= 0
    std::vector<double> proxy;
    Matrix individual;       // steps x N
    Matrix credit;           // steps x N, rows sum to 1
    Matrix distance_targets; // steps x N, D_Q(o_t, o_g) under the snapshot
};

/// `repr == nullptr` embeds observations with the identity map.
RewardBundle shape_rewards(const replay::Episode& episode, const subgoal::EpisodeValues& values,
                           const subgoal::SubgoalAssignment& assignment, std::vector<ReprNet>* repr, double lambda);

} // namespace maser::reward
