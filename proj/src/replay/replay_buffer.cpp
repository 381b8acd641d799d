#include "maser/replay/replay_buffer.hpp"

#include "maser/errors.hpp"

#include <numeric>
#include <ostream>

namespace maser::replay {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) {
        throw ConfigError("replay buffer capacity must be positive");
    }
}

void ReplayBuffer::push(Episode episode) {
    episode.validate();
    episodes_.push_back(std::make_shared<const Episode>(std::move(episode)));
    ++pushed_;
    while (episodes_.size() > capacity_) {
        episodes_.pop_front();
    }
}

std::vector<EpisodePtr> ReplayBuffer::sample(std::size_t m, std::mt19937_64& rng) const {
    if (episodes_.empty()) {
        throw UsageError("cannot sample from an empty replay buffer; collect episodes first");
    }
    std::vector<EpisodePtr> out;
    out.reserve(m);
    const std::size_t n = episodes_.size();
    if (n >= m) {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        for (std::size_t k = 0; k < m; ++k) {
            std::uniform_int_distribution<std::size_t> pick(k, n - 1);
            std::swap(idx[k], idx[pick(rng)]);
            out.push_back(episodes_[idx[k]]);
        }
    } else {
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (std::size_t k = 0; k < m; ++k) {
            out.push_back(episodes_[pick(rng)]);
        }
    }
    return out;
}

void ReplayBuffer::write_log(std::ostream& out) const {
    for (const EpisodePtr& e : episodes_) {
        write_episode_log(out, *e);
    }
}

} // namespace maser::replay
