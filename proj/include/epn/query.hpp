#pragma once

#include "epn/graph.hpp"
#include "epn/independence.hpp"

namespace epn {

/// Outward breadth-first visitation order from the effect observation
/// point. order[0] is the EOP; children are enqueued by descending edge
/// probability, ties by ascending type id; revisits of cycle nodes are
/// ignored, so every reachable node appears exactly once.
struct CausalSearchOrder {
    std::vector<EventType> order;
};

CausalSearchOrder causal_search_order(const EpnSnapshot& snapshot, EventType eop);

/// Per-query set of pruned edges. The shared snapshot is never touched;
/// removals live only in this overlay.
class EdgeOverlay {
public:
    explicit EdgeOverlay(std::uint32_t n) : n_(n), removed_(std::size_t(n) * n, 0) {}

    bool removed(EventType i, EventType j) const {
        return removed_[std::size_t(i - 1) * n_ + (j - 1)] != 0;
    }
    void remove(EventType i, EventType j) {
        std::uint8_t& cell = removed_[std::size_t(i - 1) * n_ + (j - 1)];
        removed_count_ += cell == 0;
        cell = 1;
    }
    std::size_t removed_count() const { return removed_count_; }

private:
    std::uint32_t n_ = 0;
    std::vector<std::uint8_t> removed_;
    std::size_t removed_count_ = 0;
};

/// Instrumentation shared by both algorithms; optional everywhere.
struct QueryCounters {
    std::uint64_t ci_tests = 0;
    std::uint64_t ci_errors = 0;   // failed tests downgraded to "keep edge"
    std::uint64_t edges_pruned = 0;
};

/// Everything one top-k query needs. The snapshot and the CI oracle's store
/// are frozen for the duration of the query; queries are pure functions of
/// this context.
struct QueryContext {
    const EpnSnapshot* snapshot = nullptr;
    std::vector<EventType> causes;  // temporally ordered; back() is the EOP
    std::size_t k = 1;
    CiOracle* ci = nullptr;  // null disables run-time causal inference
    QueryCounters* counters = nullptr;

    EventType eop() const {
        if (causes.empty()) throw std::invalid_argument("query needs at least one cause");
        return causes.back();
    }
};

/// Ranked query answer: at most k (type, score) entries, scores
/// non-increasing, the EOP itself excluded. explored_count is the number of
/// distinct event types the algorithm examined (the full search order for
/// ES, the explored buffer for RSET).
struct RankedPrediction {
    std::vector<std::pair<EventType, double>> entries;
    std::size_t explored_count = 0;

    bool contains(EventType t) const {
        for (const auto& e : entries)
            if (e.first == t) return true;
        return false;
    }
};

/// First pruning pass: marginal independence tests (empty condition set)
/// on every edge within the EOP's reachable region. Independent edges are
/// added to the overlay; test failures keep the edge and bump
/// counters->ci_errors.
void marginal_prune(const QueryContext& ctx, const CausalSearchOrder& order,
                    EdgeOverlay& overlay);

/// Score of a node given finalized ancestor scores: sum over surviving
/// parents p of P(node|p) * finalized[p]; parents without a finalized score
/// contribute 0.
double score_node(const EpnSnapshot& snapshot, EventType node,
                  const EdgeOverlay& overlay, const std::vector<double>& finalized,
                  const std::vector<char>& has_score);

/// Exhaustive search: scores every node in the causal search order after
/// marginal and conditional pruning, then returns the k best.
RankedPrediction es_topk(const QueryContext& ctx);

/// Reduced search with early termination: best-first expansion of only the
/// EOP and current top-k entries, stopping when every candidate has been
/// expanded.
RankedPrediction rset_topk(const QueryContext& ctx);

}  // namespace epn
