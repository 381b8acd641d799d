#pragma once

#include "maser/nn/tape.hpp"

#include <span>
#include <vector>

namespace maser::nn {

struct RmsPropOptions {
    double lr = 0.0005;
    double decay = 0.99;
    double eps = 1e-5;
};

/// RMSProp in the common (non-centered, no momentum) form:
///   v <- decay * v + (1 - decay) * g^2
///   p <- p - lr * g / (sqrt(v) + eps)
/// The squared-gradient accumulators persist across calls and are bound to the
/// parameter list given at the first step; later calls must pass the same list.
class RmsProp {
public:
    explicit RmsProp(RmsPropOptions options = {}) : options_(options) {}

    /// Throws NumericalError (and leaves parameters and state untouched) if any
    /// gradient entry is non-finite.
    void step(std::span<Parameter* const> params);

    const RmsPropOptions& options() const { return options_; }
    const std::vector<Matrix>& square_averages() const { return square_avg_; }

private:
    RmsPropOptions options_;
    std::vector<Matrix> square_avg_;
};

/// Scales gradients in place so their joint L2 norm is at most `max_norm`
/// (no-op when max_norm <= 0). Returns the norm before clipping.
double clip_grad_norm(std::span<Parameter* const> params, double max_norm);

void zero_grad(std::span<Parameter* const> params);

bool all_finite(std::span<const Parameter* const> params);

} // namespace maser::nn
