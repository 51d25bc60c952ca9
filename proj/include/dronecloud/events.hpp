#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <stdexcept>
#include <variant>
#include <vector>

#include "dronecloud/types.hpp"

namespace dronecloud {

using EventId = std::uint64_t;

// Event payloads. The queue itself is agnostic; the engine dispatches on
// the variant alternative.
struct BatteryTick {
    NodeId node;
};
struct HeartbeatSweep {};
struct MetricsSample {};
struct LoadAverageSample {};
struct CreationComplete {
    std::uint64_t instance = 0;
};
// Processor-sharing completions are rescheduled whenever the share changes;
// `generation` invalidates events that were outrun by a reschedule.
struct PsCompletion {
    NodeId node;
    std::uint64_t generation = 0;
};
struct ServiceStart {
    std::size_t session = 0;
    std::uint64_t request = 0;
};
struct ResponseArrive {
    std::size_t session = 0;
    std::uint64_t request = 0;
};
struct ElectionDue {};
struct ScriptDirective {
    std::size_t index = 0;
};
struct LinkRecompute {};

using EventPayload =
    std::variant<BatteryTick, HeartbeatSweep, MetricsSample, LoadAverageSample,
                 CreationComplete, PsCompletion, ServiceStart, ResponseArrive,
                 ElectionDue, ScriptDirective, LinkRecompute>;

struct SimEvent {
    double fire_time = 0.0;
    EventId sequence = 0;
    EventPayload payload;
};

struct SchedulingInPast : std::logic_error {
    SchedulingInPast(double at, double clock)
        : std::logic_error("cannot schedule at t=" + std::to_string(at) +
                           " before clock t=" + std::to_string(clock)) {}
};

// Virtual-time event queue. Strict total order (fire_time, sequence):
// equal fire times dequeue in scheduling order.
class EventQueue {
public:
    double clock() const { return clock_; }

    EventId schedule(double at, EventPayload payload) {
        if (at < clock_) {
            throw SchedulingInPast(at, clock_);
        }
        const EventId id = next_sequence_++;
        heap_.push(SimEvent{at, id, std::move(payload)});
        return id;
    }

    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }

    // Next event with fire_time <= t_end, advancing the clock to it.
    std::optional<SimEvent> pop_until(double t_end) {
        if (heap_.empty() || heap_.top().fire_time > t_end) {
            return std::nullopt;
        }
        SimEvent ev = heap_.top();
        heap_.pop();
        clock_ = ev.fire_time;
        return ev;
    }

    std::optional<double> next_fire_time() const {
        if (heap_.empty()) {
            return std::nullopt;
        }
        return heap_.top().fire_time;
    }

    // Used by run_until when the queue drains at or before t_end.
    void advance_clock(double to) {
        if (to > clock_) {
            clock_ = to;
        }
    }

private:
    struct Later {
        bool operator()(const SimEvent& a, const SimEvent& b) const {
            if (a.fire_time != b.fire_time) {
                return a.fire_time > b.fire_time;
            }
            return a.sequence > b.sequence;
        }
    };

    std::priority_queue<SimEvent, std::vector<SimEvent>, Later> heap_;
    EventId next_sequence_ = 1;
    double clock_ = 0.0;
};

inline EventId schedule(EventQueue& queue, double at, EventPayload payload) {
    return queue.schedule(at, std::move(payload));
}

}  // namespace dronecloud
