// Closed-population vehicle mobility on the ring.
//
// Each (direction, segment) cell is seeded with round(q_j) vehicles. Every
// vehicle drives at constant speed to a destination exit a sampled number of
// exits downstream, where it is extracted and immediately replaced by a new
// vehicle injected at an exit drawn in proportion to the target of the
// segment that exit begins (same direction).

#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ringcast/densify.hpp"
#include "ringcast/ring_geometry.hpp"
#include "ringcast/rng.hpp"
#include "ringcast/scheduler.hpp"
#include "ringcast/trace.hpp"

namespace ringcast {

struct VehicleState {
    NodeId id = 0;
    double arc = 0.0;
    Direction dir = Direction::Clockwise;
    double speed_mps = 0.0;
    int destination_exit = 1;
    // Destination equals the injection exit: the trip is one full lap.
    bool full_lap = false;
};

VehicleState advance(const VehicleState& v, double dt, const RingGeometry& ring);
double extraction_time(const VehicleState& v, const RingGeometry& ring);

// Target vehicle count per (direction, segment), indexed by segment - 1.
struct FlowTargets {
    std::vector<double> clockwise;
    std::vector<double> counterclockwise;

    const std::vector<double>& of(Direction d) const { return d == Direction::Clockwise ? clockwise : counterclockwise; }
    std::vector<double>& of(Direction d) { return d == Direction::Clockwise ? clockwise : counterclockwise; }

    static FlowTargets zeros(int segments);
    // Spreads `total` vehicles as evenly as possible over all cells.
    static FlowTargets uniform_total(int segments, int total);
    static FlowTargets from_estimates(std::span<const SegmentFlowEstimate> flows, int segments);
};

// Speeds in m/s. Fixed, uniform on [lo, hi], or drawn from a histogram
// (bin by count, then uniform within the bin).
class SpeedSampler {
public:
    static SpeedSampler fixed(double mps);
    static SpeedSampler uniform(double lo_mps, double hi_mps);
    static SpeedSampler from_histogram(const Histogram& kmh_histogram);

    double sample(Rng& rng) const;
    void validate() const;

private:
    enum class Kind { Fixed, Uniform, Histogram } kind_ = Kind::Fixed;
    double lo_ = 20.0;
    double hi_ = 20.0;
    std::vector<double> bin_lo_;   // m/s
    std::vector<double> bin_hi_;
    std::vector<double> cumulative_;
};

// Number of exits traversed, uniform on [min_exits, max_exits].
struct TripSampler {
    int min_exits = 1;
    int max_exits = 5;

    int sample(Rng& rng) const { return static_cast<int>(rng.uniform_int(min_exits, max_exits)); }
};

struct MobilityConfig {
    FlowTargets targets;
    SpeedSampler speed = SpeedSampler::uniform(50.0 / 3.6, 80.0 / 3.6);
    TripSampler trip;
    std::uint64_t seed = 1;

    // Throws InputError("InvalidConfig").
    void validate(const RingGeometry& ring) const;
};

// round-half-up
int round_target(double q);

std::vector<VehicleState> seed_population(const MobilityConfig& cfg, const RingGeometry& ring, Rng& rng,
                                          NodeId first_id = 1);

// Exit where a replacement for a `dir` vehicle enters.
int sample_injection_exit(const MobilityConfig& cfg, const RingGeometry& ring, Direction dir, Rng& rng);

VehicleState replacement_injection(const VehicleState& extracted, const MobilityConfig& cfg, const RingGeometry& ring,
                                   Rng& rng, NodeId new_id);

// Inject/extract history and arc(t) for every vehicle of a run.
class MobilityTimeline {
public:
    struct Entry {
        VehicleState start;  // state at t_inject
        double t_inject = 0.0;
        double t_extract = std::numeric_limits<double>::infinity();
    };

    void inject(const VehicleState& v, double t);
    void extract(NodeId id, double t);

    const Entry& entry(NodeId id) const;
    bool contains(NodeId id) const;
    bool present(NodeId id, double t) const;
    double arc_at(NodeId id, double t, const RingGeometry& ring) const;

    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t injections() const { return injections_; }
    std::size_t extractions() const { return extractions_; }

private:
    std::vector<Entry> entries_;        // ordered by injection
    std::vector<std::size_t> index_;    // NodeId -> entries_ position + 1 (0 = absent)
    std::size_t injections_ = 0;
    std::size_t extractions_ = 0;
};

// Drives the closed population inside a Scheduler: schedules extraction
// events and performs replacements when they fire.
class MobilityProcess {
public:
    MobilityProcess(MobilityConfig cfg, const RingGeometry& ring, Rng rng, NodeId first_id = 1);

    // Seeds the population at time `t0` and schedules extractions.
    void start(Scheduler& sched, double t0 = 0.0);
    // Handles a VehicleExtract event; returns the replacement.
    VehicleState on_extract(Scheduler& sched, const SimEvent& e);

    const MobilityTimeline& timeline() const { return timeline_; }
    std::size_t population() const { return population_; }
    std::size_t initial_population() const { return initial_; }
    std::vector<NodeId> present_ids() const;

private:
    void schedule_extraction(Scheduler& sched, const VehicleState& v, double t);

    MobilityConfig cfg_;
    const RingGeometry* ring_;
    Rng rng_;
    NodeId next_id_;
    MobilityTimeline timeline_;
    std::vector<NodeId> present_;  // sorted
    std::size_t population_ = 0;
    std::size_t initial_ = 0;
};

// Mobility-only run used for dumps and conservation checks.
struct MobilityRun {
    MobilityTimeline timeline;
    std::size_t initial_population = 0;
    bool conserved = true;  // population constant at every event boundary
};

MobilityRun run_mobility(const MobilityConfig& cfg, const RingGeometry& ring, double horizon_s);

// `t,vehicle_id,arc,dir,speed` rows sampled every `interval_s`.
std::string format_mobility_dump(const MobilityTimeline& timeline, const RingGeometry& ring, double horizon_s,
                                 double interval_s);

} // namespace ringcast
