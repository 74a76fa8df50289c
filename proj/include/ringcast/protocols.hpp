// Rebroadcast protocols as per-node state machines.
//
//   Flooding     every node forwards each new message once after a small
//                uniform jitter.
//   DBF          distance-deferred forwarding: wait T_max * (1 - d/R_max);
//                any duplicate heard while waiting cancels the forward.
//   DBFHopCount  as DBF, but only a duplicate carrying a larger hop count
//                than the first copy cancels the forward.
//   RND          wait a uniform delay in [0, rnd_max]; any duplicate heard
//                while waiting cancels the forward.

#pragma once

#include <map>
#include <optional>
#include <string_view>

#include "ringcast/rng.hpp"
#include "ringcast/scheduler.hpp"

namespace ringcast {

enum class ProtocolKind { Flooding, Dbf, DbfHopCount, Rnd };

const char* to_string(ProtocolKind k);
std::optional<ProtocolKind> parse_protocol(std::string_view s);

struct ProtocolParams {
    ProtocolKind kind = ProtocolKind::DbfHopCount;
    double t_max_s = 0.5;
    double r_max_m = 300.0;
    double rnd_max_s = 0.100;
    double flood_jitter_max_s = 0.001;

    // Throws InputError("InvalidConfig"); R_max must bound the radio range.
    void validate(double radio_range_m) const;
};

double dbf_delay(double d_ab_m, const ProtocolParams& p);
double rnd_delay(Rng& rng, const ProtocolParams& p);

struct ReceptionContext {
    NodeId receiver = 0;
    NodeId sender = 0;
    double distance_m = 0.0;
    int hop_count = 0;
};

enum class MessageStatus { Fresh, Pending, Forwarded, Suppressed };

struct MessageEntry {
    MessageStatus status = MessageStatus::Fresh;
    double fire_time = 0.0;
    int first_hop_count = 0;  // hop count of the first copy received
};

class NodeProtocolState {
public:
    MessageStatus status(MessageId msg) const;
    const MessageEntry* find(MessageId msg) const;
    MessageEntry& entry(MessageId msg) { return entries_[msg]; }
    bool received(MessageId msg) const { return entries_.count(msg) != 0; }
    std::size_t pending_count() const;

private:
    std::map<MessageId, MessageEntry> entries_;
};

struct ProtocolAction {
    enum class Kind { None, ScheduleForward, CancelPending } kind = Kind::None;
    double fire_time = 0.0;
};

// Reaction to a successfully received copy of `msg`.
ProtocolAction on_receive(NodeProtocolState& state, MessageId msg, const ReceptionContext& ctx,
                          const ProtocolParams& p, double now, Rng& rng);

struct TransmitAction {
    MessageId msg = 0;
    int hop_count = 0;
};

// Pending -> Forwarded. Throws LogicError("StaleTimer") when `msg` is not
// pending at `now`.
TransmitAction on_timer_fired(NodeProtocolState& state, MessageId msg, double now);

} // namespace ringcast
