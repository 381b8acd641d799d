#pragma once

#include "maser/replay/episode.hpp"

#include <cstddef>
#include <deque>
#include <iosfwd>
#include <memory>
#include <random>
#include <vector>

namespace maser::replay {

using EpisodePtr = std::shared_ptr<const Episode>;

/// FIFO store of complete episodes. Sampled handles stay valid after eviction.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity = 5000);

    /// Validates, then appends; evicts the oldest episode when over capacity.
    void push(Episode episode);

    /// M episodes drawn uniformly: without replacement when size() >= M, with
    /// replacement otherwise. Throws UsageError on an empty buffer.
    std::vector<EpisodePtr> sample(std::size_t m, std::mt19937_64& rng) const;

    std::size_t size() const { return episodes_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return episodes_.empty(); }
    /// 0 is the oldest stored episode.
    const Episode& at(std::size_t index) const { return *episodes_.at(index); }
    /// Total number of episodes ever pushed.
    std::size_t pushed() const { return pushed_; }

    /// Dumps every stored episode, oldest first, in the episode-log format.
    void write_log(std::ostream& out) const;

private:
    std::size_t capacity_;
    std::size_t pushed_ = 0;
    std::deque<EpisodePtr> episodes_;
};

} // namespace maser::replay
