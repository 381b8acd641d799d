#pragma once

#include "maser/param_set.hpp"
#include "maser/replay/replay_buffer.hpp"

#include <iosfwd>
#include <random>
#include <span>
#include <vector>

namespace maser::subgoal {

using nn::Matrix;
using nn::RowVector;

/// Frozen copies of the utility networks and the mixer taken at the start of a
/// training block. Later optimizer steps on the online networks do not reach it.
class BlockSnapshot {
public:
    BlockSnapshot() = default;
    BlockSnapshot(const ParamSet& params, long long block);

    long long block() const { return block_; }
    int n_agents() const { return n_agents_; }
    int agent_id_slots() const { return agent_id_slots_; }
    agents::UtilityNet& utility_for(int agent) { return utility_[shared_ ? 0 : agent]; }
    mix::QMixer& mixer() { return mixer_; }

private:
    long long block_ = 0;
    int n_agents_ = 0;
    int agent_id_slots_ = 0;
    bool shared_ = false;
    std::vector<agents::UtilityNet> utility_;
    mix::QMixer mixer_;
};

/// Snapshot Q-values along one stored episode, valid steps only. Hidden states
/// are recomputed by unrolling from t = 0 with a zero initial state.
struct EpisodeValues {
    int valid_steps = 0;
    /// [agent] valid_steps x |U|
    std::vector<Matrix> q;
    /// valid_steps x N, max over available actions
    Matrix max_q;
    /// Q^tot at the stored joint action, unscaled.
    std::vector<double> q_tot;
};

std::vector<EpisodeValues> evaluate(BlockSnapshot& snapshot, std::span<const replay::EpisodePtr> batch);
EpisodeValues evaluate(BlockSnapshot& snapshot, const replay::Episode& episode);

/// alpha * max_u Q^i(o_t^i, u) + (1 - alpha) * Q^tot(o_t, u_t) / N
double score_timestep(const EpisodeValues& values, int agent, int t, double alpha);
double score_timestep(BlockSnapshot& snapshot, const replay::Episode& episode, int agent, int t, double alpha);

/// Per-agent subgoal for one episode. Timesteps are 0-based.
struct SubgoalAssignment {
    int episode_id = 0;
    std::vector<int> t_star;
    /// Copies of the stored observations at t_star.
    std::vector<RowVector> goal_obs;
};

/// argmax over valid t of score_timestep, earliest t on ties.
SubgoalAssignment select_subgoals(const EpisodeValues& values, const replay::Episode& episode, double alpha,
                                  int episode_id = 0);
SubgoalAssignment select_subgoals(BlockSnapshot& snapshot, const replay::Episode& episode, double alpha,
                                  int episode_id = 0);

/// Independent uniform draw over valid timesteps for every agent.
SubgoalAssignment select_subgoals_random(const replay::Episode& episode, std::mt19937_64& rng, int episode_id = 0);

/// Diagnostic line per agent:
///   block=<b> episode=<m> agent=<i> t_star=<t> scores=<s_0>,<s_1>,...
void write_subgoal_diagnostics(std::ostream& out, long long block, const SubgoalAssignment& assignment,
                               const EpisodeValues& values, double alpha);

} // namespace maser::subgoal
