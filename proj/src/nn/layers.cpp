#include "maser/nn/layers.hpp"

#include "maser/errors.hpp"

#include <cmath>

namespace maser::nn {

Matrix fan_in_uniform(Eigen::Index fan_in, Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = dist(rng);
        }
    }
    return m;
}

Linear::Linear(std::string name, Eigen::Index in, Eigen::Index out, Rng& rng)
    : weight_(name + ".weight", fan_in_uniform(in, in, out, rng)), bias_(name + ".bias", Matrix::Zero(1, out)) {}

Var Linear::forward(Tape& tape, const Var& x) {
    if (x.cols() != in_features()) {
        throw ConfigError(weight_.name + ": input has " + std::to_string(x.cols()) + " features, expected " +
                          std::to_string(in_features()));
    }
    return add_row(matmul(x, tape.parameter(weight_)), tape.parameter(bias_));
}

GruCell::GruCell(std::string name, Eigen::Index in, Eigen::Index hidden, Rng& rng)
    : input_weight_(name + ".input_weight", fan_in_uniform(in, in, 3 * hidden, rng)),
      hidden_weight_(name + ".hidden_weight", fan_in_uniform(hidden, hidden, 3 * hidden, rng)),
      input_bias_(name + ".input_bias", Matrix::Zero(1, 3 * hidden)),
      hidden_bias_(name + ".hidden_bias", Matrix::Zero(1, 3 * hidden)) {}

Var GruCell::forward(Tape& tape, const Var& x, const Var& h) {
    if (x.cols() != input_size()) {
        throw ConfigError("gru: input has " + std::to_string(x.cols()) + " features, expected " +
                          std::to_string(input_size()));
    }
    return step(tape, input_projection(tape, x), h);
}

Var GruCell::input_projection(Tape& tape, const Var& x) {
    if (x.cols() != input_size()) {
        throw ConfigError("gru: input has " + std::to_string(x.cols()) + " features, expected " +
                          std::to_string(input_size()));
    }
    return add_row(matmul(x, tape.parameter(input_weight_)), tape.parameter(input_bias_));
}

Var GruCell::step(Tape& tape, const Var& projected, const Var& h) {
    const Eigen::Index n = hidden_size();
    if (projected.cols() != 3 * n || h.cols() != n || projected.rows() != h.rows()) {
        throw ConfigError("gru: projection " + std::to_string(projected.rows()) + "x" +
                          std::to_string(projected.cols()) + ", hidden " + std::to_string(h.rows()) + "x" +
                          std::to_string(h.cols()));
    }
    const Var hp = add_row(matmul(h, tape.parameter(hidden_weight_)), tape.parameter(hidden_bias_));
    const Var gates = sigmoid(add(cols(projected, 0, 2 * n), cols(hp, 0, 2 * n)));
    const Var reset = cols(gates, 0, n);
    const Var update = cols(gates, n, n);
    const Var candidate = tanh(add(cols(projected, 2 * n, n), mul(reset, cols(hp, 2 * n, n))));
    return add(mul(one_minus(update), candidate), mul(update, h));
}

} // namespace maser::nn
