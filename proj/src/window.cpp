#include "epn/window.hpp"

#include <algorithm>
#include <cmath>

namespace epn {

void PartitionedWindow::ingest(const EventInstance& ev) {
    if (std::isnan(ev.timestamp))
        throw OutOfOrderError("event timestamp is not a number");
    if (ev.timestamp < start_)
        throw OutOfOrderError("event precedes window start");
    auto [it, fresh] = partitions_.try_emplace(ev.cra);
    Partition& part = it->second;
    if (fresh) part.cra = ev.cra;
    if (!part.events.empty() && ev.timestamp < part.events.back().timestamp) {
        // late within the partition: stable insert before the first later event
        auto pos = std::upper_bound(
            part.events.begin(), part.events.end(), ev.timestamp,
            [](double ts, const EventInstance& e) { return ts < e.timestamp; });
        part.events.insert(pos, ev);
    } else {
        part.events.push_back(ev);
    }
    ++event_count_;
}

WindowRoll close_window(PartitionedWindow window) {
    PartitionedWindow successor(
        std::isfinite(window.period()) ? window.start() + window.period()
                                       : window.start(),
        window.period());
    if (window.partitions().empty()) {
        // a pure clock advance: seeds survive an entirely empty period
        successor.set_carried(window.carried());
    } else {
        std::map<Cra, EventInstance> seeds;
        for (const auto& [cra, part] : window.partitions())
            seeds.emplace(cra, part.events.back());
        successor.set_carried(std::move(seeds));
    }
    return WindowRoll{std::move(window), std::move(successor)};
}

}  // namespace epn
