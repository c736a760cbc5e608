#include "epn/frequency.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace epn {

namespace {

ObserveStats scan_partition(const Partition& part, const EventInstance* seed,
                            FrequencyMatrix& freq) {
    ObserveStats stats;
    EventType prev = seed ? seed->type : 0;
    for (const EventInstance& ev : part.events) {
        if (prev != 0 && prev != ev.type) {
            freq.increment(prev, ev.type);
            ++stats.pairs_counted;
        }
        prev = ev.type;
        ++stats.events_scanned;
    }
    return stats;
}

}  // namespace

ObserveStats observe(const PartitionedWindow& window, FrequencyMatrix& freq) {
    ObserveStats stats;
    for (const auto& [cra, part] : window.partitions()) {
        const ObserveStats s = scan_partition(part, window.carried_for(cra), freq);
        stats.events_scanned += s.events_scanned;
        stats.pairs_counted += s.pairs_counted;
    }
    return stats;
}

ObserveStats observe_parallel(const PartitionedWindow& window, FrequencyMatrix& freq) {
#ifndef _OPENMP
    return observe(window, freq);
#else
    std::vector<const Partition*> parts;
    parts.reserve(window.partition_count());
    for (const auto& [cra, part] : window.partitions()) parts.push_back(&part);

    const int max_threads = omp_get_max_threads();
    std::vector<FrequencyMatrix> partial(max_threads, FrequencyMatrix(freq.size()));
    std::vector<ObserveStats> partial_stats(max_threads);

    #pragma omp parallel for schedule(static)
    for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(parts.size()); ++idx) {
        const int tid = omp_get_thread_num();
        const Partition& part = *parts[idx];
        const ObserveStats s =
            scan_partition(part, window.carried_for(part.cra), partial[tid]);
        partial_stats[tid].events_scanned += s.events_scanned;
        partial_stats[tid].pairs_counted += s.pairs_counted;
    }

    ObserveStats stats;
    for (int t = 0; t < max_threads; ++t) {
        freq.add(partial[t]);
        stats.events_scanned += partial_stats[t].events_scanned;
        stats.pairs_counted += partial_stats[t].pairs_counted;
    }
    return stats;
#endif
}

}  // namespace epn
