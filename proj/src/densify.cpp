#include "ringcast/densify.hpp"

#include <sstream>

#include "ringcast/error.hpp"
#include "ringcast/text.hpp"

namespace ringcast {

void DensifyParams::validate() const {
    if (!(h_s > 0.0)) throw InputError("InvalidParams", "sampling interval h must be > 0");
    if (!(penetration > 0.0) || penetration > 1.0) {
        throw InputError("InvalidParams", "penetration rate a must be in (0, 1]");
    }
}

SegmentFlowEstimate estimate_segment(std::span<const ProbeSignal> signals, double length_m,
                                     const DensifyParams& params) {
    params.validate();
    if (!(length_m > 0.0)) throw InputError("InvalidParams", "segment length must be > 0");
    double covered = 0.0;
    for (const auto& s : signals) covered += s.distance(params);
    SegmentFlowEstimate e;
    e.n = signals.size();
    e.m = covered / length_m;
    e.q = e.m / params.penetration;
    e.length_m = length_m;
    return e;
}

std::vector<SegmentFlowEstimate> estimate_all(std::span<const EpochSnapshot> snapshots, const RingGeometry& ring,
                                              const DensifyParams& params) {
    params.validate();
    const auto segs = static_cast<std::size_t>(ring.segment_count());
    std::vector<SegmentFlowEstimate> out;
    out.reserve(2 * segs);
    for (auto dir : {Direction::Clockwise, Direction::Counterclockwise}) {
        for (const auto& seg : ring.segments()) {
            SegmentFlowEstimate e;
            e.direction = dir;
            e.segment = seg.index;
            e.length_m = seg.length;
            out.push_back(e);
        }
    }
    if (snapshots.empty()) return out;

    std::vector<std::vector<ProbeSignal>> per_segment(2 * segs);
    for (const auto& snap : snapshots) {
        for (auto& v : per_segment) v.clear();
        for (auto dir : {Direction::Clockwise, Direction::Counterclockwise}) {
            const std::size_t base = dir == Direction::Clockwise ? 0 : segs;
            for (const auto& entry : snap.entries(dir)) {
                const auto j = static_cast<std::size_t>(ring.segment_of(entry.arc));
                per_segment[base + j - 1].push_back(ProbeSignal{entry.vehicle_id, entry.speed_mps});
            }
        }
        for (std::size_t k = 0; k < out.size(); ++k) {
            const auto e = estimate_segment(per_segment[k], out[k].length_m, params);
            out[k].n += e.n;
            out[k].m += e.m;
        }
    }
    const auto epochs = static_cast<double>(snapshots.size());
    for (auto& e : out) {
        e.m /= epochs;
        e.q = e.m / params.penetration;
    }
    return out;
}

std::string format_flows(std::span<const SegmentFlowEstimate> flows, const RingGeometry& ring) {
    std::string out = "direction,segment,j,n_j,m_j,q_j,L_j\n";
    for (const auto& f : flows) {
        const auto& seg = ring.segment(f.segment);
        out += to_string(f.direction);
        out += ',' + ring.exit(seg.start_exit).label + "-" + ring.exit(seg.end_exit).label;
        out += ',' + std::to_string(f.segment);
        out += ',' + std::to_string(f.n);
        out += ',' + text::fixed(f.m, 9);
        out += ',' + text::fixed(f.q, 9);
        out += ',' + text::fixed(f.length_m, 3);
        out += '\n';
    }
    return out;
}

std::vector<SegmentFlowEstimate> parse_flows(std::string_view body) {
    std::vector<SegmentFlowEstimate> out;
    std::istringstream in{std::string(body)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::is_skippable(line) || text::trim(line).starts_with("direction")) continue;
        const auto cols = text::split(line);
        const auto where = "flows line " + std::to_string(lineno);
        if (cols.size() != 7) throw InputError("MalformedLine", where + ": expected 7 fields");
        SegmentFlowEstimate e;
        if (cols[0] == "cw") {
            e.direction = Direction::Clockwise;
        } else if (cols[0] == "ccw") {
            e.direction = Direction::Counterclockwise;
        } else {
            throw InputError("MalformedLine", where + ": direction must be cw or ccw");
        }
        const auto j = text::parse_int(cols[2]);
        const auto n = text::parse_int(cols[3]);
        const auto m = text::parse_double(cols[4]);
        const auto q = text::parse_double(cols[5]);
        const auto len = text::parse_double(cols[6]);
        if (!j || !n || !m || !q || !len || *q < 0.0) throw InputError("MalformedLine", where + ": bad number");
        e.segment = static_cast<int>(*j);
        e.n = static_cast<std::size_t>(*n);
        e.m = *m;
        e.q = *q;
        e.length_m = *len;
        out.push_back(e);
    }
    return out;
}

} // namespace ringcast
