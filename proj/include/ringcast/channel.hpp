// Shared broadcast channel: unit-disk radio, carrier sense, fixed-rate
// airtime and receiver-side collision accounting.
//
// A frame started at t_start by S is heard by every node present at t_start
// within radio range of S (closed ball). At a receiver, overlapping heard
// frames form an episode; every frame of an episode with two or more frames
// is destroyed there, and the episode counts as one collision. A node also
// misses frames that overlap its own transmissions (half duplex); that loss
// is not a collision. Intervals that only touch do not overlap.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include "ringcast/scheduler.hpp"

namespace ringcast {

using FrameId = std::uint64_t;

struct ChannelConfig {
    double bitrate_bps = 160000.0;
    double radio_range_m = 300.0;
    double cs_jitter_max_s = 0.001;
    // A frame becomes detectable by carrier sense this long after it starts.
    double cs_delay_s = 0.0;
    // false: ideal channel, no carrier sense and no losses.
    bool collisions = true;

    // Throws InputError("InvalidConfig").
    void validate() const;
    double airtime(int size_bits) const { return static_cast<double>(size_bits) / bitrate_bps; }
};

struct Frame {
    FrameId id = 0;
    MessageId message = 0;
    int hop_count = 0;
    NodeId sender = 0;
    double sender_arc = 0.0;
    int size_bits = 0;
    double t_start = 0.0;
    double t_end = 0.0;
    std::vector<NodeId> receivers;  // in range at t_start, ascending
    std::vector<char> corrupted;    // parallel to receivers
};

// Node positions and presence, provided by the simulation.
class NodeView {
public:
    virtual ~NodeView() = default;
    virtual std::vector<NodeId> present_nodes(double t) const = 0;
    virtual bool is_present(NodeId id, double t) const = 0;
    virtual double arc_of(NodeId id, double t) const = 0;
    virtual double distance(NodeId a, NodeId b, double t) const = 0;
};

struct Delivery {
    NodeId receiver = 0;
    double distance_m = 0.0;
};

class Channel {
public:
    Channel(ChannelConfig cfg, const NodeView& nodes);

    const ChannelConfig& config() const { return cfg_; }

    // Nodes within radio range of `id` at time t, ascending.
    std::vector<NodeId> neighbors(NodeId id, double t) const;

    // End of the busy period sensed by `node` at `now`, if the medium is busy.
    std::optional<double> busy_until(NodeId node, double now) const;

    // Starts a frame now; returns the frame and the receivers whose episode
    // just became a collision.
    struct StartResult {
        const Frame* frame = nullptr;
        std::vector<NodeId> new_collisions;
    };
    StartResult start(NodeId sender, MessageId msg, int hop_count, int size_bits, double now);

    // Completes the frame at its t_end and returns the successful deliveries.
    std::vector<Delivery> finish(FrameId id, double now);

    const Frame* active(FrameId id) const;
    std::uint64_t collisions() const { return collisions_; }

private:
    struct Heard {
        FrameId frame;
        std::size_t receiver_index;
        double t_start;
        double t_end;
    };
    struct RxState {
        std::vector<Heard> ongoing;
        bool episode_counted = false;
    };
    struct OwnTx {
        double t_start;
        double t_end;
    };

    ChannelConfig cfg_;
    const NodeView* nodes_;
    std::unordered_map<FrameId, Frame> active_;
    std::unordered_map<NodeId, RxState> rx_;
    std::unordered_map<NodeId, std::vector<OwnTx>> own_;
    FrameId next_frame_ = 1;
    std::uint64_t collisions_ = 0;
};

} // namespace ringcast
