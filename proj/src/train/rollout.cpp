#include "maser/train/rollout.hpp"

#include "maser/agents/policy.hpp"
#include "maser/errors.hpp"

#include <memory>

namespace maser::train {

using nn::Matrix;
using nn::RowVector;

namespace {

// Per-agent recurrent state for stepwise decentralized execution.
class AgentStates {
public:
    explicit AgentStates(ParamSet& params) : params_(params) {
        for (int i = 0; i < params.n_agents(); ++i) {
            hidden_.push_back(Matrix::Zero(1, params.utility_for(i).hidden_dim()));
        }
    }

    agents::QVector q(int agent, const RowVector& obs) {
        const int slots = params_.agent_id_slots();
        Matrix input = Matrix::Zero(1, obs.size() + slots);
        input.row(0).head(obs.size()) = obs;
        if (slots > 0) {
            input(0, obs.size() + agent) = 1.0;
        }
        return params_.utility_for(agent).step(input, hidden_[agent]);
    }

private:
    ParamSet& params_;
    std::vector<Matrix> hidden_;
};

} // namespace

replay::Episode rollout(ParamSet& params, env::Environment& env, std::uint64_t env_seed, double epsilon,
                        std::mt19937_64& rng) {
    const env::EnvInfo info = env.info();
    if (info.n_agents != params.n_agents() || info.n_actions != params.n_actions()) {
        throw ConfigError("rollout: environment and parameters disagree on shapes");
    }
    replay::Episode ep =
        replay::Episode::empty(info.n_agents, info.n_actions, info.obs_dim, info.state_dim, info.episode_limit);
    env.reset(env_seed);
    AgentStates agents_state(params);
    std::vector<int> actions(info.n_agents);
    for (int t = 0; t < info.episode_limit && !env.terminal(); ++t) {
        const Matrix obs = env.observations();
        const Matrix avail = env.available_actions();
        ep.states.row(t) = env.state_vector();
        for (int i = 0; i < info.n_agents; ++i) {
            ep.observations[i].row(t) = obs.row(i);
            ep.available[i].row(t) = avail.row(i);
            const agents::QVector q = agents_state.q(i, obs.row(i));
            actions[i] = agents::act_epsilon_greedy(q, epsilon, rng, avail.row(i));
            ep.actions[i][t] = actions[i];
        }
        const env::StepOutcome out = env.step(actions);
        ep.rewards[t] = out.reward;
        ep.valid[t] = 1;
        ep.done[t] = out.done ? 1 : 0;
        ep.won = out.won;
    }
    const int last = ep.valid_steps() - 1;
    if (last < 0 || !ep.done[last]) {
        throw UsageError("rollout: environment '" + env.name() + "' did not terminate within its episode limit");
    }
    return ep;
}

JointPolicy greedy_policy(ParamSet& params) {
    auto state = std::make_shared<AgentStates>(params);
    return [state, n = params.n_agents()](const env::Environment& env) {
        const Matrix obs = env.observations();
        const Matrix avail = env.available_actions();
        std::vector<int> actions(n);
        for (int i = 0; i < n; ++i) {
            actions[i] = agents::greedy_action(state->q(i, obs.row(i)), avail.row(i));
        }
        return actions;
    };
}

double evaluate_policy(const std::function<JointPolicy()>& make_policy, env::Environment& env, int episodes,
                       std::uint64_t seed) {
    if (episodes < 1) {
        throw ConfigError("evaluate_policy: need at least one episode");
    }
    std::mt19937_64 seeds(seed);
    int wins = 0;
    for (int k = 0; k < episodes; ++k) {
        env.reset(seeds());
        JointPolicy policy = make_policy();
        bool won = false;
        const int limit = env.info().episode_limit;
        for (int t = 0; t < limit && !env.terminal(); ++t) {
            won = env.step(policy(env)).won;
        }
        wins += won ? 1 : 0;
    }
    return static_cast<double>(wins) / static_cast<double>(episodes);
}

double evaluate_policy(ParamSet& params, env::Environment& env, int episodes, std::uint64_t seed) {
    return evaluate_policy([&params] { return greedy_policy(params); }, env, episodes, seed);
}

} // namespace maser::train
