// Fixtures and brute-force checkers shared by the test executables.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "ringcast/channel.hpp"
#include "ringcast/ring_geometry.hpp"
#include "ringcast/simulation.hpp"

namespace fixture {

using namespace ringcast;

// ~100 m x ~100 m square near Rome; exits on opposite corners.
inline RingGeometry square_ring() {
    std::vector<GeoPoint> v{{41.9, 12.5}, {41.9, 12.5012}, {41.9009, 12.5012}, {41.9009, 12.5}};
    std::vector<NamedPoint> exits{{"A", v[0]}, {"B", v[2]}};
    return RingGeometry::build(v, exits);
}

// Static nodes on a straight line; arcs are positions along the line.
class LineView : public NodeView {
public:
    explicit LineView(std::map<NodeId, double> pos) : pos_(std::move(pos)) {}
    std::vector<NodeId> present_nodes(double) const override {
        std::vector<NodeId> out;
        for (const auto& [id, x] : pos_) out.push_back(id);
        return out;
    }
    bool is_present(NodeId id, double) const override { return pos_.count(id) != 0; }
    double arc_of(NodeId id, double) const override { return pos_.at(id); }
    double distance(NodeId a, NodeId b, double) const override { return std::abs(pos_.at(a) - pos_.at(b)); }

private:
    std::map<NodeId, double> pos_;
};

inline SimulationSetup line_setup(const std::vector<double>& node_arcs, ProtocolKind kind, double duration,
                                  double period) {
    SimulationSetup s;
    s.distance = DistanceModel::Line;
    s.rsu_arc = 0.0;
    for (std::size_t i = 0; i < node_arcs.size(); ++i) {
        s.static_nodes.push_back(StaticNode{static_cast<NodeId>(i + 1), node_arcs[i]});
    }
    s.channel.collisions = false;
    s.protocol.kind = kind;
    s.duration_s = duration;
    s.rsu_period_s = period;
    return s;
}

// Recomputes every frame's receiver set from the recorded positions and
// counts collision episodes by sweeping each receiver's heard frames.
struct Recount {
    std::uint64_t collisions = 0;
    bool receivers_match = true;
};

inline Recount recount_collisions(const SimulationResult& r, const SimulationSetup& s) {
    const RunPositions pos(r, s);
    Recount out;
    std::map<NodeId, std::vector<std::pair<double, double>>> heard;
    for (const auto& f : r.frames) {
        std::vector<NodeId> rx;
        const double sender_arc = pos.arc_of(f.sender, f.t_start);
        for (NodeId n : pos.present_nodes(f.t_start)) {
            if (n == f.sender) continue;
            const double a = pos.arc_of(n, f.t_start);
            const double d = s.distance == DistanceModel::Line
                                 ? std::abs(a - sender_arc)
                                 : 2.0 * (s.ring->circumference() / (2.0 * 3.14159265358979323846)) *
                                       std::sin(3.14159265358979323846 *
                                                std::min(std::fmod(std::abs(a - sender_arc), s.ring->circumference()),
                                                         s.ring->circumference() -
                                                             std::fmod(std::abs(a - sender_arc), s.ring->circumference())) /
                                                s.ring->circumference());
            if (d <= s.channel.radio_range_m + 1e-9) rx.push_back(n);
        }
        std::sort(rx.begin(), rx.end());
        if (rx != f.receivers) out.receivers_match = false;
        for (NodeId n : f.receivers) heard[n].emplace_back(f.t_start, f.t_end);
    }
    if (!s.channel.collisions) return out;
    for (auto& [node, iv] : heard) {
        std::sort(iv.begin(), iv.end());
        double end = -1.0;
        int members = 0;
        for (const auto& [a, b] : iv) {
            if (a < end) {
                ++members;
                end = std::max(end, b);
            } else {
                if (members >= 2) ++out.collisions;
                members = 1;
                end = b;
            }
        }
        if (members >= 2) ++out.collisions;
    }
    return out;
}

} // namespace fixture
