#include "maser/replay/episode.hpp"

#include "maser/errors.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>

namespace maser::replay {

Episode Episode::empty(int n_agents, int n_actions, int obs_dim, int state_dim, int length) {
    Episode e;
    e.n_agents = n_agents;
    e.n_actions = n_actions;
    e.obs_dim = obs_dim;
    e.state_dim = state_dim;
    e.length = length;
    for (int i = 0; i < n_agents; ++i) {
        e.observations.push_back(Matrix::Zero(length, obs_dim));
        Matrix avail = Matrix::Zero(length, n_actions);
        avail.col(0).setOnes();
        e.available.push_back(std::move(avail));
        e.actions.emplace_back(length, 0);
    }
    e.states = Matrix::Zero(length, state_dim);
    e.rewards.assign(length, 0.0);
    e.done.assign(length, 0);
    e.valid.assign(length, 0);
    return e;
}

int Episode::valid_steps() const {
    int n = 0;
    while (n < length && valid[n]) {
        ++n;
    }
    return n;
}

double Episode::total_reward() const {
    double total = 0.0;
    for (int t = 0; t < length; ++t) {
        if (valid[t]) {
            total += rewards[t];
        }
    }
    return total;
}

void Episode::validate() const {
    auto fail = [](const std::string& what) { throw ConfigError("malformed episode: " + what); };
    if (n_agents < 1 || n_actions < 1 || length < 1) {
        fail("empty dimensions");
    }
    if (static_cast<int>(observations.size()) != n_agents || static_cast<int>(available.size()) != n_agents ||
        static_cast<int>(actions.size()) != n_agents) {
        fail("per-agent sequence count differs from n_agents");
    }
    if (states.rows() != length || states.cols() != state_dim) {
        fail("state sequence shape");
    }
    if (static_cast<int>(rewards.size()) != length || static_cast<int>(done.size()) != length ||
        static_cast<int>(valid.size()) != length) {
        fail("reward/done/valid length");
    }
    const int n_valid = valid_steps();
    if (n_valid == 0) {
        fail("no valid steps");
    }
    for (int t = n_valid; t < length; ++t) {
        if (valid[t]) {
            fail("valid mask is not a prefix");
        }
    }
    if (!done[n_valid - 1]) {
        fail("last valid step is not marked done");
    }
    for (int t = 0; t < n_valid - 1; ++t) {
        if (done[t]) {
            fail("done flag before the last valid step");
        }
    }
    for (int i = 0; i < n_agents; ++i) {
        if (observations[i].rows() != length || observations[i].cols() != obs_dim) {
            fail("observation shape for agent " + std::to_string(i));
        }
        if (available[i].rows() != length || available[i].cols() != n_actions) {
            fail("availability shape for agent " + std::to_string(i));
        }
        if (static_cast<int>(actions[i].size()) != length) {
            fail("action length for agent " + std::to_string(i));
        }
        for (int t = 0; t < length; ++t) {
            const int a = actions[i][t];
            if (a < 0 || a >= n_actions) {
                fail("action out of range");
            }
            if (available[i](t, a) != 1.0) {
                fail("agent " + std::to_string(i) + " took an unavailable action at t=" + std::to_string(t));
            }
            if (!valid[t] && a != 0) {
                fail("padding step with a non-no-op action");
            }
        }
        if (!observations[i].allFinite()) {
            fail("non-finite observation");
        }
    }
    for (double r : rewards) {
        if (!std::isfinite(r)) {
            fail("non-finite reward");
        }
    }
}

void write_episode_log(std::ostream& out, const Episode& e) {
    const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
    out << "# episode agents=" << e.n_agents << " actions=" << e.n_actions << " obs_dim=" << e.obs_dim
        << " length=" << e.length << " won=" << (e.won ? 1 : 0) << '\n';
    for (int t = 0; t < e.length && e.valid[t]; ++t) {
        out << "t=" << t << " r=" << e.rewards[t] << " done=" << static_cast<int>(e.done[t]) << " a=";
        for (int i = 0; i < e.n_agents; ++i) {
            out << (i ? "," : "") << e.actions[i][t];
        }
        for (int i = 0; i < e.n_agents; ++i) {
            out << " o" << i << '=';
            for (int k = 0; k < e.obs_dim; ++k) {
                out << (k ? "," : "") << e.observations[i](t, k);
            }
        }
        out << '\n';
    }
    out.precision(old_precision);
}

} // namespace maser::replay
