// Probe-vehicle GPS trace analysis: parse, filter, map-match, classify
// direction, cut into 30 s epochs and four daily periods, and summarize
// inter-vehicle gap and speed distributions.

#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ringcast/ring_geometry.hpp"

namespace ringcast {

using VehicleId = std::int64_t;
// Civil local time as seconds since 1970-01-01T00:00:00 (no time zone).
using Timestamp = std::int64_t;

std::optional<Timestamp> parse_timestamp(std::string_view s);  // YYYY-MM-DDTHH:MM:SS
std::string format_timestamp(Timestamp t);
int seconds_of_day(Timestamp t);

struct GpsRecord {
    std::int64_t record_id = 0;
    VehicleId vehicle_id = 0;
    Timestamp t = 0;
    GeoPoint pos;
    double speed_kmh = 0.0;
    int quality = 0;
};

inline constexpr std::string_view kTraceHeader = "record_id,vehicle_id,timestamp,lat,lon,speed_kmh,quality";

struct ParseResult {
    std::vector<GpsRecord> records;
    std::size_t rejects = 0;
};

// Malformed rows are tallied in `rejects`, never thrown. Throws
// InputError("UnreadableStream") only when the stream itself fails.
ParseResult parse_records(std::istream& in);
ParseResult parse_records(std::string_view text);
std::string format_records(std::span<const GpsRecord> records);

std::vector<GpsRecord> filter_quality(std::span<const GpsRecord> records, int min_quality);

struct MatchedRecord {
    VehicleId vehicle_id = 0;
    Timestamp t = 0;
    double arc = 0.0;
    double offset = 0.0;
    double speed_mps = 0.0;
};

struct MatchResult {
    std::vector<MatchedRecord> matched;
    std::size_t dropped = 0;  // farther than max_offset from the ring
};

MatchResult match_records(const RingGeometry& ring, std::span<const GpsRecord> records,
                          double max_offset_m = kDefaultMaxOffsetM);

struct VehicleTrack {
    VehicleId vehicle_id = 0;
    std::vector<MatchedRecord> records;  // strictly increasing t
    std::optional<Direction> direction;  // nullopt = Unknown
};

// Groups by vehicle (ascending id) and sorts by time. Of several records with
// the same timestamp the last one in input order is kept.
std::vector<VehicleTrack> build_tracks(std::span<const MatchedRecord> matched);

// Majority vote over signed shorter-way arc deltas; ties or fewer than two
// records give Unknown.
std::optional<Direction> classify_direction(const VehicleTrack& track, const RingGeometry& ring);

enum class TimePeriod { P1, P2, P3, P4 };
inline constexpr std::array<TimePeriod, 4> kAllPeriods{TimePeriod::P1, TimePeriod::P2, TimePeriod::P3,
                                                       TimePeriod::P4};

const char* to_string(TimePeriod p);
std::optional<TimePeriod> parse_period(std::string_view s);
// [07,11) [11,15) [15,19) [19,23) local hours; anything else is out of window.
std::optional<TimePeriod> bin_time_period(Timestamp t);

struct SnapshotEntry {
    VehicleId vehicle_id = 0;
    double arc = 0.0;
    double speed_mps = 0.0;
};

struct EpochSnapshot {
    Timestamp epoch_start = 0;
    std::vector<SnapshotEntry> clockwise;
    std::vector<SnapshotEntry> counterclockwise;

    const std::vector<SnapshotEntry>& entries(Direction d) const {
        return d == Direction::Clockwise ? clockwise : counterclockwise;
    }
    std::vector<SnapshotEntry>& entries(Direction d) {
        return d == Direction::Clockwise ? clockwise : counterclockwise;
    }
};

inline constexpr Timestamp kDefaultEpochS = 30;

// Bins [k*epoch, (k+1)*epoch); per vehicle per bin the latest record wins.
// Unknown-direction tracks are excluded. Entries are sorted by vehicle id.
std::vector<EpochSnapshot> epoch_snapshots(std::span<const VehicleTrack> tracks, Timestamp epoch_s = kDefaultEpochS);

// Distance from each vehicle to the nearest vehicle ahead in `dir`, aligned
// with snapshot.entries(dir). Fewer than two vehicles yield no gaps.
std::vector<double> inter_vehicle_gaps(const EpochSnapshot& snapshot, Direction dir, const RingGeometry& ring);

struct Histogram {
    double lower = 0.0;
    double bin_width = 1.0;
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;
    double sum = 0.0;

    Histogram() = default;
    Histogram(double lower_bound, double width) : lower(lower_bound), bin_width(width) {}

    void add(double x);
    std::optional<double> mean() const;
};

struct PeriodSummary {
    TimePeriod period = TimePeriod::P1;
    std::size_t vehicle_count = 0;
    std::optional<double> mean_speed_kmh;
    std::optional<double> share_gap_le_50m;
    Histogram gap_histogram;
    Histogram speed_histogram;
};

struct SummaryOptions {
    double gap_bin_m = 10.0;
    double speed_bin_kmh = 5.0;
    double short_gap_m = 50.0;
};

// Summary over the snapshots that belong to one period.
PeriodSummary summarize_period(TimePeriod period, std::span<const EpochSnapshot> snapshots, const RingGeometry& ring,
                               const SummaryOptions& opts = {});

// Splits snapshots by the period of their epoch start; out-of-window epochs are dropped.
std::array<std::vector<EpochSnapshot>, 4> group_by_period(std::span<const EpochSnapshot> snapshots);

struct PipelineOptions {
    int min_quality = 1;
    double max_offset_m = kDefaultMaxOffsetM;
    Timestamp epoch_s = kDefaultEpochS;
    SummaryOptions summary;
};

struct PipelineResult {
    std::size_t parsed = 0;
    std::size_t rejected = 0;
    std::size_t below_quality = 0;
    std::size_t off_ring = 0;
    std::vector<VehicleTrack> tracks;
    std::array<std::vector<EpochSnapshot>, 4> snapshots_by_period;
    std::array<PeriodSummary, 4> summaries;
};

PipelineResult run_pipeline(const RingGeometry& ring, std::span<const GpsRecord> records, const PipelineOptions& opts);

std::string format_summaries(std::span<const PeriodSummary> summaries);
std::string format_histogram(const Histogram& h);

} // namespace ringcast
