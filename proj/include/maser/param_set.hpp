#pragma once

#include "maser/agents/utility_net.hpp"
#include "maser/env/environment.hpp"
#include "maser/mix/qmixer.hpp"
#include "maser/reward/repr_net.hpp"

#include <cstdint>
#include <vector>

namespace maser {

struct NetworkDims {
    int hidden = 64;
    int mixer_embed = 32;
    int repr_hidden = 128;
};

/// Every learnable array of a run: utility networks, mixer and representation
/// networks, plus target copies of the utility networks and the mixer.
///
/// With shared agent parameters a single utility network serves all agents and
/// its input carries an agent-id one-hot.
class ParamSet {
public:
    ParamSet() = default;
    ParamSet(const env::EnvInfo& info, const NetworkDims& dims, bool share_agent_params, std::uint64_t seed);

    int n_agents() const { return n_agents_; }
    int n_actions() const { return n_actions_; }
    bool shared() const { return shared_; }
    /// Width of the agent-id one-hot appended to utility-network inputs.
    int agent_id_slots() const { return shared_ ? n_agents_ : 0; }

    agents::UtilityNet& utility_for(int agent) { return utility[shared_ ? 0 : agent]; }
    agents::UtilityNet& target_utility_for(int agent) { return target_utility[shared_ ? 0 : agent]; }

    /// Trainable arrays in a fixed order: utility nets, mixer, representation nets.
    std::vector<nn::Parameter*> online_parameters();
    std::vector<const nn::Parameter*> online_parameters() const;
    std::vector<const nn::Parameter*> target_parameters() const;
    /// Online then target arrays; the checkpoint contents.
    std::vector<const nn::Parameter*> all_parameters() const;
    std::vector<nn::Parameter*> all_parameters();

    /// Copies online utility and mixer values into their targets.
    void sync_targets();
    /// max |target - online| over utility nets and mixer.
    double target_gap() const;

    std::vector<agents::UtilityNet> utility;
    std::vector<agents::UtilityNet> target_utility;
    mix::QMixer mixer;
    mix::QMixer target_mixer;
    std::vector<reward::ReprNet> repr;

private:
    int n_agents_ = 0;
    int n_actions_ = 0;
    bool shared_ = false;
};

} // namespace maser
