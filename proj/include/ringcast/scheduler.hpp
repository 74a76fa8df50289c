// Deterministic discrete-event queue. Events run in (time, seq) order; seq
// is the insertion counter, so equal-time events run in insertion order.

#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <unordered_set>
#include <vector>

namespace ringcast {

using NodeId = std::int64_t;
using MessageId = std::int64_t;
using EventId = std::uint64_t;

enum class EventKind {
    MessageGenerate,
    TransmitAttempt,
    TransmitEnd,
    TimerFired,
    VehicleExtract,
    Probe,  // generic hook, used by tests and sampling
};

const char* to_string(EventKind k);

struct SimEvent {
    double time = 0.0;
    EventId seq = 0;  // assigned by schedule()
    EventKind kind = EventKind::Probe;
    NodeId node = -1;
    MessageId msg = -1;
    int hop = 0;
    std::uint64_t ref = 0;  // frame id or other payload
};

class Scheduler {
public:
    using Handler = std::function<void(const SimEvent&)>;

    double now() const { return now_; }

    // Throws LogicError("PastEvent") when e.time < now().
    EventId schedule(SimEvent e);
    void cancel(EventId id);

    // Executes every event with time <= until, then sets now() = until.
    void run_until(double until, const Handler& handler);

    // Includes cancelled events not yet discarded.
    std::size_t queued() const { return queue_.size(); }
    std::uint64_t executed() const { return executed_; }

private:
    struct Later {
        bool operator()(const SimEvent& a, const SimEvent& b) const {
            return a.time > b.time || (a.time == b.time && a.seq > b.seq);
        }
    };

    std::priority_queue<SimEvent, std::vector<SimEvent>, Later> queue_;
    std::unordered_set<EventId> cancelled_;
    double now_ = 0.0;
    EventId next_seq_ = 0;
    std::uint64_t executed_ = 0;
};

} // namespace ringcast
