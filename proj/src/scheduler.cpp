#include "ringcast/scheduler.hpp"

#include <string>

#include "ringcast/error.hpp"

namespace ringcast {

const char* to_string(EventKind k) {
    switch (k) {
    case EventKind::MessageGenerate: return "generate";
    case EventKind::TransmitAttempt: return "tx_attempt";
    case EventKind::TransmitEnd: return "tx_end";
    case EventKind::TimerFired: return "timer";
    case EventKind::VehicleExtract: return "extract";
    case EventKind::Probe: return "probe";
    }
    return "?";
}

EventId Scheduler::schedule(SimEvent e) {
    if (e.time < now_) {
        throw LogicError("PastEvent", "event at t=" + std::to_string(e.time) + " before now=" + std::to_string(now_));
    }
    e.seq = next_seq_++;
    queue_.push(e);
    return e.seq;
}

void Scheduler::cancel(EventId id) {
    if (id < next_seq_) cancelled_.insert(id);
}

void Scheduler::run_until(double until, const Handler& handler) {
    if (until < now_) {
        throw LogicError("PastEvent", "run_until(" + std::to_string(until) + ") before now=" + std::to_string(now_));
    }
    while (!queue_.empty() && queue_.top().time <= until) {
        const SimEvent e = queue_.top();
        queue_.pop();
        if (cancelled_.erase(e.seq) > 0) continue;
        now_ = e.time;
        ++executed_;
        handler(e);
    }
    now_ = until;
}

} // namespace ringcast
