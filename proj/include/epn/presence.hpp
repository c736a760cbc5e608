#pragma once

#include <cstdint>

#include "epn/types.hpp"
#include "epn/window.hpp"

namespace epn {

/// Bounded ring of per-partition presence vectors: one bit per event type,
/// set when the type occurred at least once in the partition. Feeds the
/// contingency counts behind the conditional independence tests. Eviction
/// is strictly oldest-first.
class PresenceSampleStore {
public:
    PresenceSampleStore() = default;
    PresenceSampleStore(std::uint32_t type_count, std::size_t capacity)
        : n_(type_count),
          capacity_(capacity),
          words_per_sample_((type_count + 63) / 64) {
        if (capacity_ == 0) throw std::invalid_argument("store capacity must be positive");
        bits_.assign(capacity_ * words_per_sample_, 0);
    }

    std::uint32_t type_count() const { return n_; }
    std::size_t capacity() const { return capacity_; }
    std::size_t sample_count() const { return count_; }
    bool empty() const { return count_ == 0; }

    /// Running total of event instances behind the recorded samples
    /// (not reduced by eviction); backs the event-count N_s mode.
    std::uint64_t total_events() const { return total_events_; }

    /// Appends one presence vector for a closed partition.
    void record(const Partition& partition) {
        const std::size_t slot = (head_ + count_) % capacity_;
        std::uint64_t* words = &bits_[slot * words_per_sample_];
        for (std::size_t w = 0; w < words_per_sample_; ++w) words[w] = 0;
        for (const EventInstance& ev : partition.events) {
            if (ev.type < 1 || ev.type > n_)
                throw std::out_of_range("event type id outside presence store");
            words[(ev.type - 1) / 64] |= std::uint64_t(1) << ((ev.type - 1) % 64);
        }
        if (count_ == capacity_)
            head_ = (head_ + 1) % capacity_;  // overwrote the oldest slot
        else
            ++count_;
        total_events_ += partition.events.size();
    }

    /// Presence bit for sample index s in [0, sample_count), oldest first.
    bool present(std::size_t s, EventType t) const {
        const std::size_t slot = (head_ + s) % capacity_;
        return (bits_[slot * words_per_sample_ + (t - 1) / 64] >>
                ((t - 1) % 64)) & 1;
    }

    /// Number of retained samples in which type t occurs.
    std::uint64_t marginal_count(EventType t) const {
        std::uint64_t c = 0;
        for (std::size_t s = 0; s < count_; ++s) c += present(s, t);
        return c;
    }

private:
    std::uint32_t n_ = 0;
    std::size_t capacity_ = 0;
    std::size_t words_per_sample_ = 0;
    std::vector<std::uint64_t> bits_;
    std::size_t head_ = 0;
    std::size_t count_ = 0;
    std::uint64_t total_events_ = 0;
};

/// Records one presence sample for a closed partition.
inline void record_partition(const Partition& partition, PresenceSampleStore& store) {
    store.record(partition);
}

}  // namespace epn
