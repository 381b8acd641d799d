#include "maser/agents/policy.hpp"

#include "maser/errors.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace maser::agents {

double EpsilonSchedule::value(long long step) const {
    if (anneal_steps <= 0 || step >= anneal_steps) {
        return end;
    }
    const double frac = static_cast<double>(std::max(step, 0LL)) / static_cast<double>(anneal_steps);
    return start + (end - start) * frac;
}

int greedy_action(const QVector& q, const RowVector& mask) {
    if (q.size() != mask.size()) {
        throw ConfigError("greedy_action: q and mask sizes differ");
    }
    int best = -1;
    for (Eigen::Index a = 0; a < q.size(); ++a) {
        if (mask(a) > 0.0 && (best < 0 || q(a) > q(best))) {
            best = static_cast<int>(a);
        }
    }
    if (best < 0) {
        throw UsageError("no available action");
    }
    return best;
}

int act_epsilon_greedy(const QVector& q, double epsilon, std::mt19937_64& rng, const RowVector& mask) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < epsilon) {
        std::vector<int> valid;
        for (Eigen::Index a = 0; a < mask.size(); ++a) {
            if (mask(a) > 0.0) {
                valid.push_back(static_cast<int>(a));
            }
        }
        if (valid.empty()) {
            throw UsageError("no available action");
        }
        std::uniform_int_distribution<std::size_t> pick(0, valid.size() - 1);
        return valid[pick(rng)];
    }
    return greedy_action(q, mask);
}

Matrix masked_max(const Matrix& q, const Matrix& mask) {
    if (q.rows() != mask.rows() || q.cols() != mask.cols()) {
        throw ConfigError("masked_max: shape mismatch");
    }
    Matrix out(q.rows(), 1);
    for (Eigen::Index r = 0; r < q.rows(); ++r) {
        double best = -std::numeric_limits<double>::infinity();
        for (Eigen::Index a = 0; a < q.cols(); ++a) {
            if (mask(r, a) > 0.0) {
                best = std::max(best, q(r, a));
            }
        }
        if (best == -std::numeric_limits<double>::infinity()) {
            throw UsageError("masked_max: row without an available action");
        }
        out(r, 0) = best;
    }
    return out;
}

} // namespace maser::agents
