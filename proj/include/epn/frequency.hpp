#pragma once

#include <cstdint>

#include "epn/types.hpp"
#include "epn/window.hpp"

namespace epn {

/// N x N matrix of precedence observation counts. counts(i,j) is the number
/// of times an instance of type i immediately preceded an instance of type j
/// within a partition. The diagonal is structurally zero and counts only
/// ever increase.
class FrequencyMatrix {
public:
    FrequencyMatrix() = default;
    explicit FrequencyMatrix(std::uint32_t n) : n_(n), counts_(std::size_t(n) * n, 0) {}

    std::uint32_t size() const { return n_; }

    std::uint64_t at(EventType i, EventType j) const { return counts_[index(i, j)]; }

    void increment(EventType i, EventType j) {
        if (i == j) throw std::invalid_argument("same-type precedence pair");
        ++counts_[index(i, j)];
    }

    /// Bulk accumulate, used when deserializing.
    void add_count(EventType i, EventType j, std::uint64_t n) {
        if (i == j) throw std::invalid_argument("same-type precedence pair");
        counts_[index(i, j)] += n;
    }

    std::uint64_t row_sum(EventType i) const {
        std::uint64_t s = 0;
        const std::size_t base = std::size_t(i - 1) * n_;
        for (std::size_t j = 0; j < n_; ++j) s += counts_[base + j];
        return s;
    }

    std::uint64_t total() const {
        std::uint64_t s = 0;
        for (auto c : counts_) s += c;
        return s;
    }

    /// Entrywise accumulate; used to merge per-thread partials.
    void add(const FrequencyMatrix& other) {
        if (other.n_ != n_) throw std::invalid_argument("matrix size mismatch");
        for (std::size_t k = 0; k < counts_.size(); ++k) counts_[k] += other.counts_[k];
    }

    bool operator==(const FrequencyMatrix&) const = default;

private:
    std::size_t index(EventType i, EventType j) const {
        if (i < 1 || i > n_ || j < 1 || j > n_)
            throw std::out_of_range("event type id outside frequency matrix");
        return std::size_t(i - 1) * n_ + (j - 1);
    }

    std::uint32_t n_ = 0;
    std::vector<std::uint64_t> counts_;
};

struct ObserveStats {
    std::uint64_t events_scanned = 0;  // window events touched (seeds excluded)
    std::uint64_t pairs_counted = 0;   // increments applied
};

/// Counts every consecutive same-partition pair of distinct types, with the
/// carried seed prepended to its partition. The pair scan slides by one
/// event: in A,A,B the pair (A,B) is still counted.
ObserveStats observe(const PartitionedWindow& window, FrequencyMatrix& freq);

/// OpenMP variant: partitions are scanned in parallel into per-thread
/// matrices and merged. Produces counts identical to observe().
ObserveStats observe_parallel(const PartitionedWindow& window, FrequencyMatrix& freq);

}  // namespace epn
