#include "epn/graph.hpp"

#include <algorithm>

namespace epn {

EpnSnapshot::EpnSnapshot(TypeRegistry registry, FrequencyMatrix freq,
                         std::uint64_t total_events_seen)
    : registry_(std::move(registry)),
      freq_(std::move(freq)),
      total_events_(total_events_seen) {
    if (registry_.count() != freq_.size())
        throw std::invalid_argument("registry and frequency matrix disagree on N");
    const std::uint32_t n = freq_.size();
    children_.resize(n);
    parents_.resize(n);
    row_sums_.assign(n, 0);

    for (EventType i = 1; i <= n; ++i) row_sums_[i - 1] = freq_.row_sum(i);

    for (EventType i = 1; i <= n; ++i) {
        const std::uint64_t row = row_sums_[i - 1];
        for (EventType j = 1; j <= n; ++j) {
            ++cells_touched_;
            if (i == j) continue;
            const std::uint64_t c = freq_.at(i, j);
            if (c == 0) continue;
            const double p = static_cast<double>(c) / static_cast<double>(row);
            children_[i - 1].push_back({j, p, c});
            parents_[j - 1].push_back({i, p});
            ++edge_count_;
        }
    }

    for (auto& kids : children_)
        std::sort(kids.begin(), kids.end(), [](const ChildEdge& a, const ChildEdge& b) {
            if (a.prob != b.prob) return a.prob > b.prob;
            return a.child < b.child;
        });
    for (auto& pars : parents_)
        std::sort(pars.begin(), pars.end(), [](const ParentEdge& a, const ParentEdge& b) {
            if (a.prob != b.prob) return a.prob > b.prob;
            return a.parent < b.parent;
        });
}

double EpnSnapshot::cond_prob(EventType i, EventType j) const {
    const std::uint64_t c = freq_.at(i, j);
    if (c == 0) return 0.0;
    return static_cast<double>(c) / static_cast<double>(row_sums_[i - 1]);
}

EpnSnapshot generate_graph(const FrequencyMatrix& freq, const TypeRegistry& registry,
                           std::uint64_t total_events_seen) {
    return EpnSnapshot(registry, freq, total_events_seen);
}

EpnSnapshot update(const PartitionedWindow& window, const EpnSnapshot& prev) {
    FrequencyMatrix freq = prev.freq();
    const ObserveStats stats = observe(window, freq);
    return EpnSnapshot(prev.registry(), std::move(freq),
                       prev.total_events_seen() + stats.events_scanned);
}

ObserveStats EpnBuilder::consume(const PartitionedWindow& window) {
    const ObserveStats stats =
        parallel_ ? observe_parallel(window, freq_) : observe(window, freq_);
    total_events_ += stats.events_scanned;
    return stats;
}

std::shared_ptr<const EpnSnapshot> EpnBuilder::publish() const {
    return std::make_shared<const EpnSnapshot>(registry_, freq_, total_events_);
}

}  // namespace epn
