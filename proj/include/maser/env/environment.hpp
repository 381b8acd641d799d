#pragma once

#include "maser/nn/tape.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>

namespace maser::env {

using nn::Matrix;
using nn::RowVector;

/// Static shape of a cooperative task.
struct EnvInfo {
    int n_agents = 0;
    int n_actions = 0;
    int obs_dim = 0;
    int state_dim = 0;
    int episode_limit = 0;
};

struct StepOutcome {
    double reward = 0.0;
    bool done = false;
    bool won = false;
};

/// A cooperative Dec-POMDP as seen by the learner: one shared reward, a
/// per-agent local observation, a global state vector for centralized training,
/// and per-agent action availability.
class Environment {
public:
    virtual ~Environment() = default;

    virtual EnvInfo info() const = 0;
    virtual std::string name() const = 0;

    virtual void reset(std::uint64_t seed) = 0;
    /// Throws UsageError when called on a terminal state or with an action the
    /// agent may not take.
    virtual StepOutcome step(std::span<const int> actions) = 0;

    /// n_agents x obs_dim
    virtual Matrix observations() const = 0;
    /// 1 x state_dim
    virtual RowVector state_vector() const = 0;
    /// n_agents x n_actions, entries 0 or 1
    virtual Matrix available_actions() const = 0;

    virtual int timestep() const = 0;
    virtual bool terminal() const = 0;

    virtual std::unique_ptr<Environment> clone() const = 0;
};

} // namespace maser::env
