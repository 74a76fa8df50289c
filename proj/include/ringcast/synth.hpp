// Synthetic traffic with known per-segment vehicle counts, used as an
// oracle for densification.
//
// Every vehicle drives at L_j / h on each segment, so it spends exactly one
// sampling interval per segment and reports one record there. Vehicles are
// organised in conveyors: a conveyor covers 2..6 consecutive segments and
// injects a vehicle every h seconds, which keeps exactly one of its vehicles
// on each covered segment at all times. The count on a segment is the number
// of conveyors covering it.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ringcast/ring_geometry.hpp"
#include "ringcast/rng.hpp"
#include "ringcast/trace.hpp"

namespace ringcast {

struct SynthParams {
    double circumference_m = 29000.0;
    int segments = 29;
    // Truth per segment, index j - 1. Empty: a default profile is drawn.
    std::vector<int> counts_cw;
    std::vector<int> counts_ccw;
    int min_count = 5;
    int max_count = 60;
    double h_s = 30.0;
    TimePeriod period = TimePeriod::P3;
    std::string date = "2010-05-12";
    std::uint64_t seed = 1;

    // Throws InputError("InvalidConfig").
    void validate() const;
};

struct TruthRow {
    Direction direction = Direction::Clockwise;
    int segment = 0;
    int count = 0;
};

struct SynthVehicle {
    VehicleId id = 0;
    Direction direction = Direction::Clockwise;
    std::vector<int> path;  // segments in travel order
    double t_inject = 0.0;  // seconds relative to the period start
    double first_record = 0.0;
};

struct SynthPopulation {
    RingGeometry ring;
    std::vector<TruthRow> truth;  // clockwise 1..S, then counterclockwise
    std::vector<SynthVehicle> vehicles;  // only vehicles with >= 1 record
    double h_s = 30.0;
    Timestamp period_start = 0;
    Timestamp period_end = 0;
};

// Throws InputError("InvalidDensity") when a count is negative or a profile
// cannot be realised by vehicles travelling at least two segments
// (N_j > N_{j-1} + N_{j+1}).
void check_profile(const std::vector<int>& counts);

// Smooth default profile within [min_count, max_count].
std::vector<int> default_profile(int segments, int min_count, int max_count, double phase, Rng& rng);

SynthPopulation synth_population(const SynthParams& params);

// Records of the listed vehicles, ordered by time then vehicle id.
std::vector<GpsRecord> synth_records(const SynthPopulation& pop, const std::vector<SynthVehicle>& vehicles);

// Keeps each vehicle independently with probability `penetration`.
std::vector<SynthVehicle> thin_vehicles(const SynthPopulation& pop, double penetration, std::uint64_t seed);

std::string format_truth(const SynthPopulation& pop);

} // namespace ringcast
