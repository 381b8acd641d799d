#pragma once

#include "maser/nn/layers.hpp"

#include <string>
#include <vector>

namespace maser::mix {

using nn::Matrix;
using nn::Tape;
using nn::Var;

/// Monotonic mixer combining N local Q-values into Q^tot, conditioned on the
/// global state through hypernetworks:
///
///   hidden = elu(q |W1(s)| + b1(s))            W1(s): N x E
///   Q^tot  = hidden . |w2(s)| + V(s)           w2(s): E,  V(s) = relu(s A + a) c + d
///
/// The absolute values make every dQ^tot/dq_i non-negative.
class QMixer {
public:
    QMixer() = default;
    QMixer(const std::string& name, int n_agents, int state_dim, int embed_dim, nn::Rng& rng);

    /// q: B x N local values, states: B x state_dim. Returns B x 1.
    Var mix(Tape& tape, const Var& q, const Var& states);

    int n_agents() const { return n_agents_; }
    int state_dim() const { return static_cast<int>(hyper_b1_.in_features()); }
    int embed_dim() const { return embed_; }

    nn::Linear& hyper_w1() { return hyper_w1_; }
    nn::Linear& hyper_b1() { return hyper_b1_; }
    nn::Linear& hyper_w2() { return hyper_w2_; }
    nn::Linear& value_hidden() { return value_hidden_; }
    nn::Linear& value_out() { return value_out_; }

    std::vector<nn::Parameter*> parameters();
    std::vector<const nn::Parameter*> parameters() const;

private:
    int n_agents_ = 0;
    int embed_ = 0;
    nn::Linear hyper_w1_;
    nn::Linear hyper_b1_;
    nn::Linear hyper_w2_;
    nn::Linear value_hidden_;
    nn::Linear value_out_;
};

} // namespace maser::mix
