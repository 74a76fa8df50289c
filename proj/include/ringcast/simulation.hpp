// One protocol run: RSU, vehicles and/or static nodes, shared channel and
// per-node protocol state, driven by a single scheduler.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ringcast/channel.hpp"
#include "ringcast/metrics.hpp"
#include "ringcast/mobility.hpp"
#include "ringcast/protocols.hpp"
#include "ringcast/ring_geometry.hpp"

namespace ringcast {

inline constexpr NodeId kRsuId = 0;

// Chord: straight-line distance on the ring drawn as a circle.
// Line: |arc_a - arc_b|, for straight-road fixtures.
enum class DistanceModel { Chord, Line };

struct StaticNode {
    NodeId id = 0;
    double arc = 0.0;
};

struct SimulationSetup {
    const RingGeometry* ring = nullptr;  // required for vehicles and Chord
    double rsu_arc = 0.0;
    std::optional<MobilityConfig> mobility;  // seed comes from `seed`
    std::vector<StaticNode> static_nodes;    // ids > 0, never extracted
    ChannelConfig channel;
    ProtocolParams protocol;
    double rsu_period_s = 1.0;
    int msg_size_bits = 2000;
    double duration_s = 100.0;
    std::uint64_t seed = 1;
    DistanceModel distance = DistanceModel::Chord;
    bool event_log = true;

    // Throws InputError("InvalidConfig").
    void validate() const;
};

struct FrameRecord {
    FrameId id = 0;
    NodeId sender = 0;
    MessageId msg = 0;
    int hop = 0;
    double t_start = 0.0;
    double t_end = 0.0;
    std::vector<NodeId> receivers;
};

struct SimulationResult {
    MetricsReport report;
    DeliveryLedger ledger;
    std::string event_log;  // `t,kind,node,msg,hop,detail`
    std::vector<FrameRecord> frames;
    // Positions as used by the run, for post-hoc checks.
    MobilityTimeline timeline;          // vehicles
    std::map<NodeId, double> fixed_arcs;  // RSU and static nodes
    std::map<std::pair<NodeId, MessageId>, int> transmissions;
    std::uint64_t executed_events = 0;
};

SimulationResult run_simulation(const SimulationSetup& setup);

// Node positions of a finished run.
class RunPositions : public NodeView {
public:
    RunPositions(const SimulationResult& r, const SimulationSetup& setup);
    std::vector<NodeId> present_nodes(double t) const override;
    bool is_present(NodeId id, double t) const override;
    double arc_of(NodeId id, double t) const override;
    double distance(NodeId a, NodeId b, double t) const override;

private:
    const SimulationResult* r_;
    const SimulationSetup* s_;
};

extern const char* const kEventLogHeader;

// Number of RSU messages in a run: one at every multiple of the period in (0, duration].
int rsu_message_count(double period_s, double duration_s);

} // namespace ringcast
