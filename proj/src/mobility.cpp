#include "ringcast/mobility.hpp"

#include <algorithm>
#include <cmath>

#include "ringcast/error.hpp"
#include "ringcast/text.hpp"

namespace ringcast {

VehicleState advance(const VehicleState& v, double dt, const RingGeometry& ring) {
    VehicleState out = v;
    const double step = v.speed_mps * dt;
    out.arc = v.dir == Direction::Clockwise ? ring.wrap(v.arc + step) : ring.wrap(v.arc - step);
    if (dt > 0.0) out.full_lap = false;
    return out;
}

double extraction_time(const VehicleState& v, const RingGeometry& ring) {
    double d = ring.directed_arc_distance(v.arc, ring.exit(v.destination_exit).arc, v.dir);
    if (v.full_lap && d == 0.0) d = ring.circumference();
    return d / v.speed_mps;
}

FlowTargets FlowTargets::zeros(int segments) {
    FlowTargets t;
    t.clockwise.assign(static_cast<std::size_t>(segments), 0.0);
    t.counterclockwise.assign(static_cast<std::size_t>(segments), 0.0);
    return t;
}

FlowTargets FlowTargets::uniform_total(int segments, int total) {
    auto t = zeros(segments);
    const int cells = 2 * segments;
    const int base = total / cells;
    const int extra = total % cells;
    // Cells interleaved cw1, ccw1, cw2, ccw2, ...; remainders spread evenly.
    std::vector<int> counts(static_cast<std::size_t>(cells), base);
    for (int i = 0; i < extra; ++i) {
        const auto cell = static_cast<std::size_t>(((2 * i + 1) * cells) / (2 * extra));
        ++counts[cell];
    }
    for (int c = 0; c < cells; ++c) {
        auto& side = (c % 2 == 0) ? t.clockwise : t.counterclockwise;
        side[static_cast<std::size_t>(c / 2)] = counts[static_cast<std::size_t>(c)];
    }
    return t;
}

FlowTargets FlowTargets::from_estimates(std::span<const SegmentFlowEstimate> flows, int segments) {
    auto t = zeros(segments);
    for (const auto& f : flows) {
        if (f.segment < 1 || f.segment > segments) {
            throw InputError("InvalidConfig", "flow row for segment " + std::to_string(f.segment) +
                                                  " but ring has " + std::to_string(segments));
        }
        t.of(f.direction)[static_cast<std::size_t>(f.segment - 1)] = f.q;
    }
    return t;
}

SpeedSampler SpeedSampler::fixed(double mps) {
    SpeedSampler s;
    s.kind_ = Kind::Fixed;
    s.lo_ = s.hi_ = mps;
    return s;
}

SpeedSampler SpeedSampler::uniform(double lo_mps, double hi_mps) {
    SpeedSampler s;
    s.kind_ = Kind::Uniform;
    s.lo_ = lo_mps;
    s.hi_ = hi_mps;
    return s;
}

SpeedSampler SpeedSampler::from_histogram(const Histogram& h) {
    SpeedSampler s;
    s.kind_ = Kind::Histogram;
    double acc = 0.0;
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        const double lo = std::max(0.0, h.lower + static_cast<double>(i) * h.bin_width) / 3.6;
        const double hi = (h.lower + static_cast<double>(i + 1) * h.bin_width) / 3.6;
        if (h.counts[i] == 0 || !(hi > 0.0)) continue;
        acc += static_cast<double>(h.counts[i]);
        s.bin_lo_.push_back(lo);
        s.bin_hi_.push_back(hi);
        s.cumulative_.push_back(acc);
    }
    if (s.cumulative_.empty()) throw InputError("InvalidConfig", "speed histogram has no positive-speed mass");
    return s;
}

double SpeedSampler::sample(Rng& rng) const {
    switch (kind_) {
    case Kind::Fixed: return lo_;
    case Kind::Uniform: return rng.uniform(lo_, hi_);
    case Kind::Histogram: {
        const double u = rng.uniform() * cumulative_.back();
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        const auto i = static_cast<std::size_t>(std::min<std::ptrdiff_t>(
            std::distance(cumulative_.begin(), it), static_cast<std::ptrdiff_t>(cumulative_.size()) - 1));
        double v = 0.0;
        do {
            v = rng.uniform(bin_lo_[i], bin_hi_[i]);
        } while (!(v > 0.0));
        return v;
    }
    }
    return lo_;
}

void SpeedSampler::validate() const {
    if (kind_ != Kind::Histogram && !(lo_ > 0.0 && hi_ >= lo_)) {
        throw InputError("InvalidConfig", "speed sampler needs 0 < min <= max");
    }
}

void MobilityConfig::validate(const RingGeometry& ring) const {
    const auto segs = static_cast<std::size_t>(ring.segment_count());
    if (targets.clockwise.size() != segs || targets.counterclockwise.size() != segs) {
        throw InputError("InvalidConfig", "flow targets must cover every segment in both directions");
    }
    for (auto d : {Direction::Clockwise, Direction::Counterclockwise}) {
        for (double q : targets.of(d)) {
            if (!(q >= 0.0) || !std::isfinite(q)) throw InputError("InvalidConfig", "flow targets must be >= 0");
        }
    }
    speed.validate();
    if (trip.min_exits < 1 || trip.max_exits < trip.min_exits || trip.max_exits > ring.exit_count()) {
        throw InputError("InvalidConfig", "trip length must satisfy 1 <= min <= max <= exit count");
    }
}

int round_target(double q) { return static_cast<int>(std::floor(q + 0.5)); }

std::vector<VehicleState> seed_population(const MobilityConfig& cfg, const RingGeometry& ring, Rng& rng,
                                          NodeId first_id) {
    cfg.validate(ring);
    std::vector<VehicleState> out;
    NodeId id = first_id;
    for (auto dir : {Direction::Clockwise, Direction::Counterclockwise}) {
        for (const auto& seg : ring.segments()) {
            const int count = round_target(cfg.targets.of(dir)[static_cast<std::size_t>(seg.index - 1)]);
            for (int k = 0; k < count; ++k) {
                VehicleState v;
                v.id = id++;
                v.dir = dir;
                v.arc = ring.wrap(seg.start_arc + rng.uniform() * seg.length);
                if (ring.segment_of(v.arc) != seg.index) v.arc = seg.start_arc;  // rounding at the far edge
                v.speed_mps = cfg.speed.sample(rng);
                const int first_exit = ring.next_exit(v.arc, dir);
                v.destination_exit = ring.exit_ahead(first_exit, cfg.trip.sample(rng) - 1, dir);
                out.push_back(v);
            }
        }
    }
    return out;
}

int sample_injection_exit(const MobilityConfig& cfg, const RingGeometry& ring, Direction dir, Rng& rng) {
    // Exit e begins segment e clockwise and segment e-1 counterclockwise.
    const auto& q = cfg.targets.of(dir);
    const int n = ring.exit_count();
    auto segment_begun = [&](int exit_id) {
        return dir == Direction::Clockwise ? exit_id : (exit_id == 1 ? n : exit_id - 1);
    };
    double total = 0.0;
    for (int e = 1; e <= n; ++e) total += q[static_cast<std::size_t>(segment_begun(e) - 1)];
    if (!(total > 0.0)) return static_cast<int>(rng.uniform_int(1, n));
    double u = rng.uniform() * total;
    for (int e = 1; e <= n; ++e) {
        const double w = q[static_cast<std::size_t>(segment_begun(e) - 1)];
        if (u < w) return e;
        u -= w;
    }
    for (int e = n; e >= 1; --e) {
        if (q[static_cast<std::size_t>(segment_begun(e) - 1)] > 0.0) return e;
    }
    return n;
}

VehicleState replacement_injection(const VehicleState& extracted, const MobilityConfig& cfg, const RingGeometry& ring,
                                   Rng& rng, NodeId new_id) {
    VehicleState v;
    v.id = new_id;
    v.dir = extracted.dir;
    const int exit_id = sample_injection_exit(cfg, ring, v.dir, rng);
    v.arc = ring.exit(exit_id).arc;
    v.speed_mps = cfg.speed.sample(rng);
    const int steps = cfg.trip.sample(rng);
    v.destination_exit = ring.exit_ahead(exit_id, steps, v.dir);
    v.full_lap = steps % ring.exit_count() == 0;
    return v;
}

void MobilityTimeline::inject(const VehicleState& v, double t) {
    if (v.id < 0) throw LogicError("InvalidVehicle", "negative vehicle id");
    const auto idx = static_cast<std::size_t>(v.id);
    if (index_.size() <= idx) index_.resize(idx + 1, 0);
    if (index_[idx] != 0) throw LogicError("DuplicateVehicle", "vehicle " + std::to_string(v.id) + " injected twice");
    entries_.push_back(Entry{v, t, std::numeric_limits<double>::infinity()});
    index_[idx] = entries_.size();
    ++injections_;
}

void MobilityTimeline::extract(NodeId id, double t) {
    if (!contains(id)) throw LogicError("UnknownVehicle", "vehicle " + std::to_string(id));
    auto& e = entries_[index_[static_cast<std::size_t>(id)] - 1];
    e.t_extract = t;
    ++extractions_;
}

bool MobilityTimeline::contains(NodeId id) const {
    return id >= 0 && static_cast<std::size_t>(id) < index_.size() && index_[static_cast<std::size_t>(id)] != 0;
}

const MobilityTimeline::Entry& MobilityTimeline::entry(NodeId id) const {
    if (!contains(id)) throw LogicError("UnknownVehicle", "vehicle " + std::to_string(id));
    return entries_[index_[static_cast<std::size_t>(id)] - 1];
}

bool MobilityTimeline::present(NodeId id, double t) const {
    if (!contains(id)) return false;
    const auto& e = entry(id);
    return t >= e.t_inject && t < e.t_extract;
}

double MobilityTimeline::arc_at(NodeId id, double t, const RingGeometry& ring) const {
    const auto& e = entry(id);
    return advance(e.start, t - e.t_inject, ring).arc;
}

MobilityProcess::MobilityProcess(MobilityConfig cfg, const RingGeometry& ring, Rng rng, NodeId first_id)
    : cfg_(std::move(cfg)), ring_(&ring), rng_(rng), next_id_(first_id) {
    cfg_.validate(ring);
}

void MobilityProcess::start(Scheduler& sched, double t0) {
    auto seeded = seed_population(cfg_, *ring_, rng_, next_id_);
    next_id_ += static_cast<NodeId>(seeded.size());
    for (const auto& v : seeded) {
        timeline_.inject(v, t0);
        present_.push_back(v.id);
        schedule_extraction(sched, v, t0);
    }
    population_ = initial_ = seeded.size();
}

void MobilityProcess::schedule_extraction(Scheduler& sched, const VehicleState& v, double t) {
    SimEvent e;
    e.time = t + extraction_time(v, *ring_);
    e.kind = EventKind::VehicleExtract;
    e.node = v.id;
    sched.schedule(e);
}

VehicleState MobilityProcess::on_extract(Scheduler& sched, const SimEvent& e) {
    const auto& gone = timeline_.entry(e.node);
    timeline_.extract(e.node, e.time);
    present_.erase(std::lower_bound(present_.begin(), present_.end(), e.node));
    const VehicleState at_exit = advance(gone.start, e.time - gone.t_inject, *ring_);
    VehicleState fresh = replacement_injection(at_exit, cfg_, *ring_, rng_, next_id_++);
    timeline_.inject(fresh, e.time);
    present_.push_back(fresh.id);  // ids grow monotonically, order is preserved
    schedule_extraction(sched, fresh, e.time);
    return fresh;
}

std::vector<NodeId> MobilityProcess::present_ids() const { return present_; }

MobilityRun run_mobility(const MobilityConfig& cfg, const RingGeometry& ring, double horizon_s) {
    RngStreams streams(cfg.seed);
    MobilityProcess proc(cfg, ring, streams.stream("mobility"));
    Scheduler sched;
    proc.start(sched, 0.0);
    MobilityRun run;
    run.initial_population = proc.initial_population();
    sched.run_until(horizon_s, [&](const SimEvent& e) {
        if (e.kind != EventKind::VehicleExtract) return;
        proc.on_extract(sched, e);
        const auto& tl = proc.timeline();
        if (proc.present_ids().size() != run.initial_population || tl.injections() - tl.extractions() !=
                                                                        run.initial_population) {
            run.conserved = false;
        }
    });
    run.timeline = proc.timeline();
    return run;
}

std::string format_mobility_dump(const MobilityTimeline& timeline, const RingGeometry& ring, double horizon_s,
                                 double interval_s) {
    std::string out = "t,vehicle_id,arc,dir,speed\n";
    if (!(interval_s > 0.0)) return out;
    const auto steps = static_cast<long long>(std::floor(horizon_s / interval_s + 1e-9));
    for (long long k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * interval_s;
        for (const auto& e : timeline.entries()) {
            if (!(t >= e.t_inject && t < e.t_extract)) continue;
            const auto v = advance(e.start, t - e.t_inject, ring);
            out += text::fixed(t, 3) + ',' + std::to_string(v.id) + ',' + text::fixed(v.arc, 3) + ',' +
                   to_string(v.dir) + ',' + text::fixed(v.speed_mps, 3) + '\n';
        }
    }
    return out;
}

} // namespace ringcast
