#include "maser/nn/optim.hpp"

#include "maser/errors.hpp"

#include <cmath>

namespace maser::nn {

void RmsProp::step(std::span<Parameter* const> params) {
    for (const Parameter* p : params) {
        if (p->grad.rows() != p->value.rows() || p->grad.cols() != p->value.cols()) {
            throw ConfigError("rmsprop: gradient shape mismatch for " + p->name);
        }
        if (!p->grad.allFinite()) {
            throw NumericalError("rmsprop: non-finite gradient in " + p->name);
        }
    }
    if (square_avg_.empty()) {
        square_avg_.reserve(params.size());
        for (const Parameter* p : params) {
            square_avg_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
        }
    } else if (square_avg_.size() != params.size()) {
        throw ConfigError("rmsprop: parameter list changed between steps");
    }
    const double decay = options_.decay;
    for (std::size_t k = 0; k < params.size(); ++k) {
        Parameter& p = *params[k];
        auto v = square_avg_[k].array();
        const auto g = p.grad.array();
        v = decay * v + (1.0 - decay) * g.square();
        p.value.array() -= options_.lr * g / (v.sqrt() + options_.eps);
    }
}

double clip_grad_norm(std::span<Parameter* const> params, double max_norm) {
    double total = 0.0;
    for (const Parameter* p : params) {
        total += p->grad.squaredNorm();
    }
    const double norm = std::sqrt(total);
    if (max_norm > 0.0 && norm > max_norm) {
        const double factor = max_norm / (norm + 1e-6);
        for (Parameter* p : params) {
            p->grad *= factor;
        }
    }
    return norm;
}

void zero_grad(std::span<Parameter* const> params) {
    for (Parameter* p : params) {
        p->zero_grad();
    }
}

bool all_finite(std::span<const Parameter* const> params) {
    for (const Parameter* p : params) {
        if (!p->value.allFinite()) {
            return false;
        }
    }
    return true;
}

} // namespace maser::nn
