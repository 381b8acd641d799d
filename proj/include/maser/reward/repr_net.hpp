#pragma once

#include "maser/nn/layers.hpp"

#include <string>
#include <vector>

namespace maser::reward {

using nn::Matrix;
using nn::Tape;
using nn::Var;

/// Observation embedding phi^i: affine + ReLU hidden layer, linear output of
/// width |U|.
class ReprNet {
public:
    ReprNet() = default;
    ReprNet(const std::string& name, int obs_dim, int hidden, int out_dim, nn::Rng& rng);

    Var forward(Tape& tape, const Var& obs);
    /// Inference-only embedding of every row.
    Matrix embed(const Matrix& obs);

    int input_dim() const { return static_cast<int>(hidden_.in_features()); }
    int output_dim() const { return static_cast<int>(out_.out_features()); }

    std::vector<nn::Parameter*> parameters();
    std::vector<const nn::Parameter*> parameters() const;

private:
    nn::Linear hidden_;
    nn::Linear out_;
};

} // namespace maser::reward
