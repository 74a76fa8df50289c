#include "ringcast/protocols.hpp"

#include <algorithm>
#include <string>

#include "ringcast/error.hpp"

namespace ringcast {

const char* to_string(ProtocolKind k) {
    switch (k) {
    case ProtocolKind::Flooding: return "flooding";
    case ProtocolKind::Dbf: return "dbf";
    case ProtocolKind::DbfHopCount: return "dbf_hc";
    case ProtocolKind::Rnd: return "rnd";
    }
    return "?";
}

std::optional<ProtocolKind> parse_protocol(std::string_view s) {
    for (auto k : {ProtocolKind::Flooding, ProtocolKind::Dbf, ProtocolKind::DbfHopCount, ProtocolKind::Rnd}) {
        if (s == to_string(k)) return k;
    }
    return std::nullopt;
}

void ProtocolParams::validate(double radio_range_m) const {
    if (!(t_max_s > 0.0)) throw InputError("InvalidConfig", "t_max_s must be > 0");
    if (!(r_max_m >= radio_range_m)) throw InputError("InvalidConfig", "r_max_m must be >= radio_range_m");
    if (!(rnd_max_s > 0.0)) throw InputError("InvalidConfig", "rnd_max_s must be > 0");
    if (!(flood_jitter_max_s > 0.0)) throw InputError("InvalidConfig", "flood_jitter_s must be > 0");
}

double dbf_delay(double d_ab_m, const ProtocolParams& p) {
    return std::max(0.0, p.t_max_s * (1.0 - d_ab_m / p.r_max_m));
}

double rnd_delay(Rng& rng, const ProtocolParams& p) { return rng.uniform(0.0, p.rnd_max_s); }

MessageStatus NodeProtocolState::status(MessageId msg) const {
    const auto it = entries_.find(msg);
    return it == entries_.end() ? MessageStatus::Fresh : it->second.status;
}

const MessageEntry* NodeProtocolState::find(MessageId msg) const {
    const auto it = entries_.find(msg);
    return it == entries_.end() ? nullptr : &it->second;
}

std::size_t NodeProtocolState::pending_count() const {
    return static_cast<std::size_t>(std::count_if(entries_.begin(), entries_.end(), [](const auto& kv) {
        return kv.second.status == MessageStatus::Pending;
    }));
}

ProtocolAction on_receive(NodeProtocolState& state, MessageId msg, const ReceptionContext& ctx,
                          const ProtocolParams& p, double now, Rng& rng) {
    if (!state.received(msg)) {
        auto& e = state.entry(msg);
        e.status = MessageStatus::Pending;
        e.first_hop_count = ctx.hop_count;
        double delay = 0.0;
        switch (p.kind) {
        case ProtocolKind::Flooding: delay = rng.uniform_open_closed(p.flood_jitter_max_s); break;
        case ProtocolKind::Dbf:
        case ProtocolKind::DbfHopCount: delay = dbf_delay(ctx.distance_m, p); break;
        case ProtocolKind::Rnd: delay = rnd_delay(rng, p); break;
        }
        e.fire_time = now + delay;
        return {ProtocolAction::Kind::ScheduleForward, e.fire_time};
    }

    auto& e = state.entry(msg);
    if (e.status != MessageStatus::Pending) return {};
    switch (p.kind) {
    case ProtocolKind::Flooding: return {};
    case ProtocolKind::Dbf:
    case ProtocolKind::Rnd: break;
    case ProtocolKind::DbfHopCount:
        if (ctx.hop_count <= e.first_hop_count) return {};
        break;
    }
    e.status = MessageStatus::Suppressed;
    return {ProtocolAction::Kind::CancelPending, e.fire_time};
}

TransmitAction on_timer_fired(NodeProtocolState& state, MessageId msg, double now) {
    const auto* found = state.find(msg);
    if (found == nullptr || found->status != MessageStatus::Pending || found->fire_time != now) {
        throw LogicError("StaleTimer", "timer for message " + std::to_string(msg) + " is not pending");
    }
    auto& e = state.entry(msg);
    e.status = MessageStatus::Forwarded;
    return {msg, e.first_hop_count + 1};
}

} // namespace ringcast
