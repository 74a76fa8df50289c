#include "ringcast/channel.hpp"

#include <algorithm>

#include "ringcast/error.hpp"

namespace ringcast {

void ChannelConfig::validate() const {
    if (!(bitrate_bps > 0.0)) throw InputError("InvalidConfig", "bitrate_bps must be > 0");
    if (!(radio_range_m > 0.0)) throw InputError("InvalidConfig", "radio_range_m must be > 0");
    if (!(cs_jitter_max_s > 0.0)) throw InputError("InvalidConfig", "cs_jitter_s must be > 0");
    if (!(cs_delay_s >= 0.0)) throw InputError("InvalidConfig", "cs_delay_s must be >= 0");
}

Channel::Channel(ChannelConfig cfg, const NodeView& nodes) : cfg_(cfg), nodes_(&nodes) { cfg_.validate(); }

std::vector<NodeId> Channel::neighbors(NodeId id, double t) const {
    std::vector<NodeId> out;
    for (NodeId other : nodes_->present_nodes(t)) {
        if (other != id && nodes_->distance(id, other, t) <= cfg_.radio_range_m) out.push_back(other);
    }
    return out;
}

std::optional<double> Channel::busy_until(NodeId node, double now) const {
    if (!cfg_.collisions) return std::nullopt;
    double end = -1.0;
    if (const auto it = rx_.find(node); it != rx_.end()) {
        for (const auto& h : it->second.ongoing) {
            if (h.t_start + cfg_.cs_delay_s < now && now < h.t_end) end = std::max(end, h.t_end);
        }
    }
    if (const auto it = own_.find(node); it != own_.end()) {
        for (const auto& tx : it->second) {
            if (tx.t_start <= now && now < tx.t_end) end = std::max(end, tx.t_end);
        }
    }
    if (end < 0.0) return std::nullopt;
    return end;
}

Channel::StartResult Channel::start(NodeId sender, MessageId msg, int hop_count, int size_bits, double now) {
    if (!nodes_->is_present(sender, now)) {
        throw LogicError("UnknownNode", "node " + std::to_string(sender) + " is not on the ring");
    }
    if (size_bits <= 0) throw LogicError("InvalidFrame", "frame size must be > 0");
    Frame f;
    f.id = next_frame_++;
    f.message = msg;
    f.hop_count = hop_count;
    f.sender = sender;
    f.sender_arc = nodes_->arc_of(sender, now);
    f.size_bits = size_bits;
    f.t_start = now;
    f.t_end = now + cfg_.airtime(size_bits);
    f.receivers = neighbors(sender, now);
    f.corrupted.assign(f.receivers.size(), 0);

    StartResult result;
    if (cfg_.collisions) {
        auto& mine = own_[sender];
        std::erase_if(mine, [&](const OwnTx& tx) { return tx.t_end + 1.0 < now; });
        mine.push_back(OwnTx{f.t_start, f.t_end});

        for (std::size_t i = 0; i < f.receivers.size(); ++i) {
            auto& rx = rx_[f.receivers[i]];
            std::erase_if(rx.ongoing, [&](const Heard& h) { return h.t_end <= now; });
            if (rx.ongoing.empty()) {
                rx.episode_counted = false;
            } else {
                f.corrupted[i] = 1;
                for (const auto& h : rx.ongoing) active_.at(h.frame).corrupted[h.receiver_index] = 1;
                if (!rx.episode_counted) {
                    rx.episode_counted = true;
                    ++collisions_;
                    result.new_collisions.push_back(f.receivers[i]);
                }
            }
            rx.ongoing.push_back(Heard{f.id, i, f.t_start, f.t_end});
        }
    }
    const FrameId id = f.id;
    result.frame = &active_.emplace(id, std::move(f)).first->second;
    return result;
}

std::vector<Delivery> Channel::finish(FrameId id, double now) {
    const auto it = active_.find(id);
    if (it == active_.end()) throw LogicError("UnknownFrame", "frame " + std::to_string(id) + " is not on air");
    const Frame f = std::move(it->second);
    active_.erase(it);

    std::vector<Delivery> out;
    for (std::size_t i = 0; i < f.receivers.size(); ++i) {
        const NodeId r = f.receivers[i];
        if (cfg_.collisions) {
            auto& rx = rx_[r];
            std::erase_if(rx.ongoing, [&](const Heard& h) { return h.frame == f.id; });
            if (f.corrupted[i]) continue;
            bool half_duplex = false;
            if (const auto own = own_.find(r); own != own_.end()) {
                for (const auto& tx : own->second) {
                    if (tx.t_start < f.t_end && f.t_start < tx.t_end) half_duplex = true;
                }
            }
            if (half_duplex) continue;
        }
        if (!nodes_->is_present(r, now)) continue;
        out.push_back(Delivery{r, nodes_->distance(f.sender, r, f.t_start)});
    }
    return out;
}

const Frame* Channel::active(FrameId id) const {
    const auto it = active_.find(id);
    return it == active_.end() ? nullptr : &it->second;
}

} // namespace ringcast
