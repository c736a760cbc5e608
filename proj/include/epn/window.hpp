#pragma once

#include <limits>
#include <map>

#include "epn/types.hpp"

namespace epn {

/// Temporally ordered events sharing one CRA value within one window.
struct Partition {
    Cra cra = 0;
    std::vector<EventInstance> events;
};

/// All partitions collected during one observation period, plus the carried
/// overlap seeds (the final event of each partition of the previous window).
/// Single writer; once closed the window is immutable and freely shareable.
class PartitionedWindow {
public:
    PartitionedWindow() = default;
    PartitionedWindow(double start, double period) : start_(start), period_(period) {}

    /// Window accepting any finite timestamp (batch / count-driven use).
    static PartitionedWindow unbounded() {
        return PartitionedWindow(-std::numeric_limits<double>::infinity(),
                                 std::numeric_limits<double>::infinity());
    }

    /// Appends the event to its CRA partition, keeping temporal order
    /// (stable on timestamp ties). Throws OutOfOrderError for events that
    /// precede the window start.
    void ingest(const EventInstance& ev);

    double start() const { return start_; }
    double period() const { return period_; }
    double end() const { return start_ + period_; }

    std::size_t partition_count() const { return partitions_.size(); }
    std::size_t event_count() const { return event_count_; }
    bool empty() const { return event_count_ == 0; }

    /// Partitions keyed by CRA; ordered so iteration is deterministic.
    const std::map<Cra, Partition>& partitions() const { return partitions_; }

    const std::map<Cra, EventInstance>& carried() const { return carried_; }
    const EventInstance* carried_for(Cra cra) const {
        auto it = carried_.find(cra);
        return it == carried_.end() ? nullptr : &it->second;
    }
    void set_carried(std::map<Cra, EventInstance> seeds) { carried_ = std::move(seeds); }

private:
    double start_ = -std::numeric_limits<double>::infinity();
    double period_ = std::numeric_limits<double>::infinity();
    std::map<Cra, Partition> partitions_;
    std::map<Cra, EventInstance> carried_;
    std::size_t event_count_ = 0;
};

struct WindowRoll {
    PartitionedWindow closed;
    PartitionedWindow successor;
};

/// Closes a window and opens its successor. The successor carries, per
/// partition of the closed window, that partition's final event as the
/// cross-window overlap seed. Seeds of the closed window that saw no new
/// events expire here.
WindowRoll close_window(PartitionedWindow window);

}  // namespace epn
