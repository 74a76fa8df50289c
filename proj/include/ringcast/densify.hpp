// Per-segment scaling of probe observations to the full vehicle population.
//
// For the probes detected on segment j, each contributes the distance it
// covers in one sampling interval, d_i = v_i * h. The estimated number of
// probe vehicles travelling the segment is m_j = sum(d_i) / L_j and the
// full-population estimate is q_j = m_j / a, with a the probe penetration
// rate. q_j is read as a vehicle count on the segment.

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ringcast/ring_geometry.hpp"
#include "ringcast/trace.hpp"

namespace ringcast {

struct DensifyParams {
    double h_s = 30.0;          // sampling interval
    double penetration = 0.02;  // a, in (0, 1]

    // Throws InputError("InvalidParams").
    void validate() const;
};

struct ProbeSignal {
    VehicleId vehicle_id = 0;
    double v_mps = 0.0;

    double distance(const DensifyParams& p) const { return v_mps * p.h_s; }
};

struct SegmentFlowEstimate {
    Direction direction = Direction::Clockwise;
    int segment = 0;
    std::size_t n = 0;     // probe signals
    double m = 0.0;        // estimated probe vehicles
    double q = 0.0;        // estimated vehicles, m / a
    double length_m = 0.0;
};

SegmentFlowEstimate estimate_segment(std::span<const ProbeSignal> signals, double length_m,
                                     const DensifyParams& params);

// One estimate per (direction, segment): clockwise segments 1..S first, then
// counterclockwise. Each snapshot (epoch) yields per-segment m_j and q_j;
// the reported values are their mean over all snapshots passed in, and n is
// the total signal count.
std::vector<SegmentFlowEstimate> estimate_all(std::span<const EpochSnapshot> snapshots, const RingGeometry& ring,
                                              const DensifyParams& params);

std::string format_flows(std::span<const SegmentFlowEstimate> flows, const RingGeometry& ring);
// Reads the (direction, j, q_j) columns back; other columns are ignored.
std::vector<SegmentFlowEstimate> parse_flows(std::string_view text);

} // namespace ringcast
