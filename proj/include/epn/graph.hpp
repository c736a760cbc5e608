#pragma once

#include <memory>
#include <span>

#include "epn/frequency.hpp"

namespace epn {

struct ChildEdge {
    EventType child = 0;
    double prob = 0.0;  // P(child | node)
    std::uint64_t count = 0;
};

struct ParentEdge {
    EventType parent = 0;
    double prob = 0.0;  // P(node | parent)
};

/// Immutable event precedence network: an edge i->j exists iff f(i,j) > 0,
/// with P(j|i) = f(i,j) / sum_k f(i,k). Cycles and anti-parallel edges are
/// allowed; self-loops are not representable. Safe to share across threads.
class EpnSnapshot {
public:
    EpnSnapshot() = default;
    EpnSnapshot(TypeRegistry registry, FrequencyMatrix freq,
                std::uint64_t total_events_seen);

    const TypeRegistry& registry() const { return registry_; }
    const FrequencyMatrix& freq() const { return freq_; }
    std::uint32_t type_count() const { return freq_.size(); }
    std::uint64_t total_events_seen() const { return total_events_; }
    std::uint64_t edge_count() const { return edge_count_; }

    /// Cells visited while deriving edges; at most N^2.
    std::uint64_t generation_cells_touched() const { return cells_touched_; }

    /// Children of a node, sorted by descending P(child|node), ties by
    /// ascending type id. This is the canonical expansion order.
    std::span<const ChildEdge> children(EventType node) const {
        return {children_[node - 1].data(), children_[node - 1].size()};
    }

    /// Parents of a node, sorted by descending P(node|parent), ties by
    /// ascending parent id.
    std::span<const ParentEdge> parents(EventType node) const {
        return {parents_[node - 1].data(), parents_[node - 1].size()};
    }

    bool has_edge(EventType i, EventType j) const { return freq_.at(i, j) > 0; }
    bool absorbing(EventType node) const { return children_[node - 1].empty(); }

    /// P(j|i); 0 when the edge is absent.
    double cond_prob(EventType i, EventType j) const;

private:
    TypeRegistry registry_;
    FrequencyMatrix freq_;
    std::vector<std::vector<ChildEdge>> children_;
    std::vector<std::vector<ParentEdge>> parents_;
    std::vector<std::uint64_t> row_sums_;
    std::uint64_t total_events_ = 0;
    std::uint64_t edge_count_ = 0;
    std::uint64_t cells_touched_ = 0;
};

/// Graph-generation step: derives edges and conditional probabilities from
/// the frequency matrix.
EpnSnapshot generate_graph(const FrequencyMatrix& freq, const TypeRegistry& registry,
                           std::uint64_t total_events_seen = 0);

/// Observation plus graph generation over one closed window. The previous
/// snapshot is left untouched; the result is an independent value.
EpnSnapshot update(const PartitionedWindow& window, const EpnSnapshot& prev);

/// Serialized builder used by the streaming engine; publishes immutable
/// snapshots while accumulating counts incrementally.
class EpnBuilder {
public:
    EpnBuilder(TypeRegistry registry, bool parallel_observe = false)
        : registry_(std::move(registry)),
          freq_(registry_.count()),
          parallel_(parallel_observe) {}

    ObserveStats consume(const PartitionedWindow& window);
    std::shared_ptr<const EpnSnapshot> publish() const;

    const FrequencyMatrix& freq() const { return freq_; }
    std::uint64_t total_events_seen() const { return total_events_; }

private:
    TypeRegistry registry_;
    FrequencyMatrix freq_;
    std::uint64_t total_events_ = 0;
    bool parallel_ = false;
};

}  // namespace epn
