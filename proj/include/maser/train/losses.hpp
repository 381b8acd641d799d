#pragma once

#include "maser/param_set.hpp"
#include "maser/replay/batch.hpp"
#include "maser/subgoal/subgoal.hpp"

#include <span>
#include <vector>

namespace maser::train {

using nn::Matrix;
using nn::RowVector;
using nn::Tape;
using nn::Var;

/// Forward values of one batch. Online quantities are recorded on the tape;
/// target-network quantities are plain constants. Row layout follows Batch.
struct BatchForward {
    const replay::Batch* batch = nullptr;
    /// [agent] rows x |U|
    std::vector<Var> q;
    /// [agent] rows x 1, Q at the stored action
    std::vector<Var> q_taken;
    /// rows x 1, online mixer at the stored joint action
    Var q_tot;
    /// [agent] rows x 1: max over actions available at t+1 of the target
    /// network's Q at t+1; zero on the last row of each episode.
    std::vector<Matrix> target_next_max;
    /// rows x 1: target mixer fed with target_next_max and the state at t+1.
    Matrix target_next_q_tot;
    /// [agent] rows x |U| embeddings; filled only when requested.
    std::vector<Var> phi;
    /// rows x 1: valid / valid_steps of the row's episode, so that a weighted
    /// sum is a per-episode mean summed over episodes.
    Matrix mean_weights;
};

BatchForward forward_batch(Tape& tape, ParamSet& params, const replay::Batch& batch, bool with_repr);

/// Snapshot view of one episode taken from the forward values.
subgoal::EpisodeValues episode_values(const BatchForward& fwd, int b);

/// r + gamma * (1 - done) * next, elementwise over rows x 1 columns.
Matrix td_targets(const Matrix& rewards, const Matrix& done, const Matrix& next, double gamma);

/// sum_r w_r (target_r - q_r)^2
Var weighted_td_loss(const Var& q, const Matrix& targets, const Matrix& weights);

/// Per-agent TD loss with individual rewards (rows x 1), summed over episodes.
Var individual_td_loss(const BatchForward& fwd, int agent, const Matrix& rewards, double gamma);

/// Mixer TD loss with proxy rewards (rows x 1), summed over episodes.
Var total_td_loss(const BatchForward& fwd, const Matrix& proxy, double gamma);

/// sum_r window_r KL(softmax(q_r) || uniform)
Var entropy_correction_loss(const Var& q, const Matrix& window);

/// KL(softmax(q) || uniform) = ln|U| - H(softmax(q)).
double kl_to_uniform(const RowVector& q);

struct LossWeights {
    double lambda_i = 0.001;
    double lambda_e = 0.001;
    double lambda_d = 0.001;
};

/// Per-term losses on one tape. Absent terms are left as invalid Vars.
struct LossTerms {
    Var l_td;
    std::vector<Var> l_i;
    std::vector<Var> l_e;
    std::vector<Var> l_d;
};

/// L_TD + sum_i (lambda_i L_i + lambda_e L_E + lambda_d L_D). Terms that are
/// absent or carry zero weight are left out of the graph entirely.
Var composite_loss(const LossTerms& terms, const LossWeights& weights);
double composite_loss(double l_td, std::span<const double> l_i, std::span<const double> l_e,
                      std::span<const double> l_d, const LossWeights& weights);

} // namespace maser::train
