#pragma once

#include "maser/nn/ops.hpp"
#include "maser/nn/tape.hpp"

#include <random>
#include <string>
#include <vector>

namespace maser::nn {

using Rng = std::mt19937_64;

/// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
Matrix fan_in_uniform(Eigen::Index fan_in, Eigen::Index rows, Eigen::Index cols, Rng& rng);

/// y = x W + b with W stored in x out layout.
class Linear {
public:
    Linear() = default;
    Linear(std::string name, Eigen::Index in, Eigen::Index out, Rng& rng);

    Var forward(Tape& tape, const Var& x);

    Eigen::Index in_features() const { return weight_.value.rows(); }
    Eigen::Index out_features() const { return weight_.value.cols(); }

    Parameter& weight() { return weight_; }
    Parameter& bias() { return bias_; }
    std::vector<Parameter*> parameters() { return {&weight_, &bias_}; }
    std::vector<const Parameter*> parameters() const { return {&weight_, &bias_}; }

private:
    Parameter weight_;
    Parameter bias_;
};

/// Gated recurrent cell with reset and update gates:
///   r = sigmoid(x Wxr + bxr + h Whr + bhr)
///   z = sigmoid(x Wxz + bxz + h Whz + bhz)
///   n = tanh(x Wxn + bxn + r * (h Whn + bhn))
///   h' = (1 - z) * n + z * h
///
/// The three gates share one input matrix (in x 3H) and one hidden matrix
/// (H x 3H), with column blocks in the order reset, update, candidate.
class GruCell {
public:
    GruCell() = default;
    GruCell(std::string name, Eigen::Index in, Eigen::Index hidden, Rng& rng);

    Var forward(Tape& tape, const Var& x, const Var& h);

    /// x Wx + bx for any number of rows; lets a sequence project all its
    /// inputs at once before stepping.
    Var input_projection(Tape& tape, const Var& x);
    /// One step from a precomputed input projection.
    Var step(Tape& tape, const Var& projected, const Var& h);

    Eigen::Index input_size() const { return input_weight_.value.rows(); }
    Eigen::Index hidden_size() const { return hidden_weight_.value.rows(); }

    std::vector<Parameter*> parameters() { return {&input_weight_, &hidden_weight_, &input_bias_, &hidden_bias_}; }
    std::vector<const Parameter*> parameters() const {
        return {&input_weight_, &hidden_weight_, &input_bias_, &hidden_bias_};
    }

private:
    Parameter input_weight_;
    Parameter hidden_weight_;
    Parameter input_bias_;
    Parameter hidden_bias_;
};

} // namespace maser::nn
