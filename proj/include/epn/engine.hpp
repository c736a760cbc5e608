#pragma once

#include <mutex>

#include "epn/graph.hpp"
#include "epn/presence.hpp"

namespace epn {

/// How the engine decides that an observation period has elapsed.
struct WindowPolicy {
    enum class Mode {
        batch,  // one window for the whole stream
        time,   // roll when an event's timestamp passes start + period
        count,  // roll every `every` ingested events
    };
    Mode mode = Mode::batch;
    double period = 0.0;        // time mode
    std::uint64_t every = 0;    // count mode

    static WindowPolicy batch() { return {}; }
    static WindowPolicy by_time(double period) {
        return {Mode::time, period, 0};
    }
    static WindowPolicy by_count(std::uint64_t every) {
        return {Mode::count, 0.0, every};
    }
};

struct EngineConfig {
    WindowPolicy window;
    std::size_t store_capacity = 100000;
    bool parallel_observe = false;
};

/// Single-writer ingestion pipeline: events accumulate in a partitioned
/// window; when the observation period elapses the window is closed, the
/// frequency matrix updated, the presence store extended by one sample per
/// partition, and a fresh immutable snapshot published. Readers obtain
/// frozen snapshot/store pointers at any time.
class StreamEngine {
public:
    StreamEngine(TypeRegistry registry, EngineConfig config);

    /// Feeds one event. In time mode, events older than the open window are
    /// rejected (counted, not thrown).
    void feed(const EventInstance& ev);

    /// Closes the trailing window. Call once after the stream ends.
    void finish();

    std::shared_ptr<const EpnSnapshot> snapshot() const;
    std::shared_ptr<const PresenceSampleStore> store() const;

    std::uint64_t events_fed() const { return events_fed_; }
    std::uint64_t events_rejected() const { return events_rejected_; }
    std::uint64_t windows_closed() const { return windows_closed_; }

private:
    void roll_window_();
    void close_into_(PartitionedWindow&& closed);

    EngineConfig config_;
    EpnBuilder builder_;
    PartitionedWindow window_;
    std::shared_ptr<PresenceSampleStore> store_;
    std::shared_ptr<const EpnSnapshot> snapshot_;
    mutable std::mutex publish_mutex_;
    bool started_ = false;
    bool finished_ = false;
    std::uint64_t events_fed_ = 0;
    std::uint64_t events_rejected_ = 0;
    std::uint64_t windows_closed_ = 0;
    std::uint64_t events_in_window_ = 0;
};

}  // namespace epn
