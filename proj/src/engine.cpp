#include "epn/engine.hpp"

#include <cmath>

namespace epn {

StreamEngine::StreamEngine(TypeRegistry registry, EngineConfig config)
    : config_(config),
      builder_(registry, config.parallel_observe),
      window_(PartitionedWindow::unbounded()),
      store_(std::make_shared<PresenceSampleStore>(registry.count(),
                                                   config.store_capacity)) {
    snapshot_ = builder_.publish();
}

void StreamEngine::feed(const EventInstance& ev) {
    if (finished_) throw std::logic_error("engine already finished");
    if (ev.type < 1 || ev.type > snapshot_->type_count())
        throw std::invalid_argument("event type not registered");

    if (config_.window.mode == WindowPolicy::Mode::time) {
        if (!started_) {
            window_ = PartitionedWindow(ev.timestamp, config_.window.period);
            started_ = true;
        }
        // time-driven: an empty period still advances the window clock
        if (ev.timestamp >= window_.end()) {
            roll_window_();
            if (ev.timestamp >= window_.end()) {
                // fast-forward across the remaining empty periods in one
                // step; seeds pass through empty windows unchanged
                const double periods = std::floor(
                    (ev.timestamp - window_.start()) / window_.period());
                PartitionedWindow advanced(
                    window_.start() + periods * window_.period(),
                    window_.period());
                advanced.set_carried(window_.carried());
                window_ = std::move(advanced);
                windows_closed_ += static_cast<std::uint64_t>(periods);
            }
            while (ev.timestamp >= window_.end()) roll_window_();
        }
    } else {
        started_ = true;
    }

    try {
        window_.ingest(ev);
    } catch (const OutOfOrderError&) {
        ++events_rejected_;
        return;
    }
    ++events_fed_;
    ++events_in_window_;

    if (config_.window.mode == WindowPolicy::Mode::count &&
        events_in_window_ >= config_.window.every)
        roll_window_();
}

void StreamEngine::roll_window_() {
    WindowRoll roll = close_window(std::move(window_));
    window_ = std::move(roll.successor);
    events_in_window_ = 0;
    if (roll.closed.empty()) {
        ++windows_closed_;
        return;  // nothing to observe, clock advanced
    }
    close_into_(std::move(roll.closed));
}

void StreamEngine::close_into_(PartitionedWindow&& closed) {
    builder_.consume(closed);

    auto next_store = std::make_shared<PresenceSampleStore>(*store_);
    for (const auto& [cra, part] : closed.partitions()) next_store->record(part);

    auto next_snapshot = builder_.publish();
    {
        std::lock_guard<std::mutex> lock(publish_mutex_);
        store_ = std::move(next_store);
        snapshot_ = std::move(next_snapshot);
    }
    ++windows_closed_;
}

void StreamEngine::finish() {
    if (finished_) return;
    roll_window_();
    finished_ = true;
}

std::shared_ptr<const EpnSnapshot> StreamEngine::snapshot() const {
    std::lock_guard<std::mutex> lock(publish_mutex_);
    return snapshot_;
}

std::shared_ptr<const PresenceSampleStore> StreamEngine::store() const {
    std::lock_guard<std::mutex> lock(publish_mutex_);
    return store_;
}

}  // namespace epn
