#include "ringcast/trace.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "ringcast/error.hpp"
#include "ringcast/text.hpp"

namespace ringcast {

namespace {

// Howard Hinnant's days_from_civil / civil_from_days.
constexpr std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct Civil {
    std::int64_t y;
    unsigned m;
    unsigned d;
};

constexpr Civil civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return {y + (m <= 2), m, d};
}

constexpr bool is_leap(std::int64_t y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

unsigned days_in_month(std::int64_t y, unsigned m) {
    static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return m == 2 && is_leap(y) ? 29 : kDays[m - 1];
}

std::optional<int> digits(std::string_view s, std::size_t pos, std::size_t n) {
    int v = 0;
    for (std::size_t i = pos; i < pos + n; ++i) {
        if (s[i] < '0' || s[i] > '9') return std::nullopt;
        v = v * 10 + (s[i] - '0');
    }
    return v;
}

Timestamp floor_div(Timestamp a, Timestamp b) {
    Timestamp q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

} // namespace

std::optional<Timestamp> parse_timestamp(std::string_view s) {
    s = text::trim(s);
    if (s.size() != 19 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') || s[13] != ':' ||
        s[16] != ':') {
        return std::nullopt;
    }
    const auto y = digits(s, 0, 4);
    const auto mo = digits(s, 5, 2);
    const auto d = digits(s, 8, 2);
    const auto h = digits(s, 11, 2);
    const auto mi = digits(s, 14, 2);
    const auto se = digits(s, 17, 2);
    if (!y || !mo || !d || !h || !mi || !se) return std::nullopt;
    if (*mo < 1 || *mo > 12 || *d < 1 || static_cast<unsigned>(*d) > days_in_month(*y, static_cast<unsigned>(*mo)) ||
        *h > 23 || *mi > 59 || *se > 59) {
        return std::nullopt;
    }
    return days_from_civil(*y, static_cast<unsigned>(*mo), static_cast<unsigned>(*d)) * 86400 + *h * 3600 +
           *mi * 60 + *se;
}

std::string format_timestamp(Timestamp t) {
    const Timestamp days = floor_div(t, 86400);
    const int sod = static_cast<int>(t - days * 86400);
    const Civil c = civil_from_days(days);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02d:%02d:%02d", static_cast<long long>(c.y), c.m, c.d,
                  sod / 3600, (sod / 60) % 60, sod % 60);
    return buf;
}

int seconds_of_day(Timestamp t) { return static_cast<int>(t - floor_div(t, 86400) * 86400); }

ParseResult parse_records(std::istream& in) {
    if (!in) throw InputError("UnreadableStream", "trace stream is not readable");
    ParseResult out;
    std::set<std::int64_t> seen_ids;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (text::trim(line).empty()) continue;
        if (first) {
            first = false;
            if (text::trim(line).starts_with("record_id")) continue;
        }
        const auto cols = text::split(line);
        if (cols.size() != 7) {
            ++out.rejects;
            continue;
        }
        const auto rid = text::parse_int(cols[0]);
        const auto vid = text::parse_int(cols[1]);
        const auto ts = parse_timestamp(cols[2]);
        const auto lat = text::parse_double(cols[3]);
        const auto lon = text::parse_double(cols[4]);
        const auto speed = text::parse_double(cols[5]);
        const auto quality = text::parse_int(cols[6]);
        if (!rid || !vid || !ts || !lat || !lon || !speed || !quality || *speed < 0.0) {
            ++out.rejects;
            continue;
        }
        GpsRecord r{*rid, *vid, *ts, GeoPoint{*lat, *lon}, *speed, static_cast<int>(*quality)};
        if (!r.pos.valid() || !seen_ids.insert(r.record_id).second) {
            ++out.rejects;
            continue;
        }
        out.records.push_back(r);
    }
    if (in.bad()) throw InputError("UnreadableStream", "read failure in trace stream");
    return out;
}

ParseResult parse_records(std::string_view text_body) {
    std::istringstream in{std::string(text_body)};
    return parse_records(in);
}

std::string format_records(std::span<const GpsRecord> records) {
    std::string out(kTraceHeader);
    out += '\n';
    for (const auto& r : records) {
        out += std::to_string(r.record_id);
        out += ',';
        out += std::to_string(r.vehicle_id);
        out += ',';
        out += format_timestamp(r.t);
        out += ',';
        out += text::fixed(r.pos.lat, 8);
        out += ',';
        out += text::fixed(r.pos.lon, 8);
        out += ',';
        out += text::fixed(r.speed_kmh, 2);
        out += ',';
        out += std::to_string(r.quality);
        out += '\n';
    }
    return out;
}

std::vector<GpsRecord> filter_quality(std::span<const GpsRecord> records, int min_quality) {
    std::vector<GpsRecord> out;
    std::copy_if(records.begin(), records.end(), std::back_inserter(out),
                 [&](const GpsRecord& r) { return r.quality >= min_quality; });
    return out;
}

MatchResult match_records(const RingGeometry& ring, std::span<const GpsRecord> records, double max_offset_m) {
    MatchResult out;
    out.matched.reserve(records.size());
    for (const auto& r : records) {
        const auto m = ring.arc_position(r.pos);
        if (m.offset > max_offset_m) {
            ++out.dropped;
            continue;
        }
        out.matched.push_back(MatchedRecord{r.vehicle_id, r.t, m.arc, m.offset, r.speed_kmh / 3.6});
    }
    return out;
}

std::vector<VehicleTrack> build_tracks(std::span<const MatchedRecord> matched) {
    std::map<VehicleId, std::vector<MatchedRecord>> by_vehicle;
    for (const auto& m : matched) by_vehicle[m.vehicle_id].push_back(m);
    std::vector<VehicleTrack> tracks;
    tracks.reserve(by_vehicle.size());
    for (auto& [id, recs] : by_vehicle) {
        std::stable_sort(recs.begin(), recs.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
        VehicleTrack track{id, {}, std::nullopt};
        for (const auto& r : recs) {
            if (!track.records.empty() && track.records.back().t == r.t) {
                track.records.back() = r;
            } else {
                track.records.push_back(r);
            }
        }
        tracks.push_back(std::move(track));
    }
    return tracks;
}

std::optional<Direction> classify_direction(const VehicleTrack& track, const RingGeometry& ring) {
    if (track.records.size() < 2) return std::nullopt;
    const double half = ring.circumference() / 2.0;
    int votes = 0;
    for (std::size_t i = 1; i < track.records.size(); ++i) {
        const double d = ring.directed_arc_distance(track.records[i - 1].arc, track.records[i].arc,
                                                    Direction::Clockwise);
        if (d == 0.0 || d == half) continue;
        votes += d < half ? 1 : -1;
    }
    if (votes > 0) return Direction::Clockwise;
    if (votes < 0) return Direction::Counterclockwise;
    return std::nullopt;
}

const char* to_string(TimePeriod p) {
    switch (p) {
    case TimePeriod::P1: return "P1";
    case TimePeriod::P2: return "P2";
    case TimePeriod::P3: return "P3";
    case TimePeriod::P4: return "P4";
    }
    return "?";
}

std::optional<TimePeriod> parse_period(std::string_view s) {
    s = text::trim(s);
    for (auto p : kAllPeriods) {
        if (s == to_string(p)) return p;
    }
    return std::nullopt;
}

std::optional<TimePeriod> bin_time_period(Timestamp t) {
    const int hour = seconds_of_day(t) / 3600;
    if (hour < 7 || hour >= 23) return std::nullopt;
    return kAllPeriods[static_cast<std::size_t>((hour - 7) / 4)];
}

std::vector<EpochSnapshot> epoch_snapshots(std::span<const VehicleTrack> tracks, Timestamp epoch_s) {
    // epoch -> (vehicle -> latest entry, direction)
    std::map<Timestamp, std::map<VehicleId, std::pair<MatchedRecord, Direction>>> bins;
    for (const auto& track : tracks) {
        if (!track.direction) continue;
        for (const auto& r : track.records) {
            auto& slot = bins[floor_div(r.t, epoch_s) * epoch_s];
            auto it = slot.find(track.vehicle_id);
            if (it == slot.end() || it->second.first.t <= r.t) slot[track.vehicle_id] = {r, *track.direction};
        }
    }
    std::vector<EpochSnapshot> out;
    out.reserve(bins.size());
    for (const auto& [start, vehicles] : bins) {
        EpochSnapshot snap;
        snap.epoch_start = start;
        for (const auto& [id, rec] : vehicles) {
            snap.entries(rec.second).push_back(SnapshotEntry{id, rec.first.arc, rec.first.speed_mps});
        }
        out.push_back(std::move(snap));
    }
    return out;
}

std::vector<double> inter_vehicle_gaps(const EpochSnapshot& snapshot, Direction dir, const RingGeometry& ring) {
    const auto& entries = snapshot.entries(dir);
    const std::size_t n = entries.size();
    if (n < 2) return {};
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return entries[a].arc < entries[b].arc || (entries[a].arc == entries[b].arc && a < b);
    });
    std::vector<double> gaps(n, 0.0);
    // Position in sorted order of each distinct-arc run; vehicles sharing an
    // arc are each other's nearest neighbour at distance 0.
    for (std::size_t k = 0; k < n; ++k) {
        const auto i = order[k];
        const double here = entries[i].arc;
        const bool shared = (k > 0 && entries[order[k - 1]].arc == here) ||
                            (k + 1 < n && entries[order[k + 1]].arc == here) ||
                            (k == 0 && entries[order[n - 1]].arc == here) ||
                            (k == n - 1 && entries[order[0]].arc == here);
        if (shared) continue;
        const std::size_t ahead = dir == Direction::Clockwise ? order[(k + 1) % n] : order[(k + n - 1) % n];
        gaps[i] = ring.directed_arc_distance(here, entries[ahead].arc, dir);
    }
    return gaps;
}

void Histogram::add(double x) {
    auto bin = static_cast<std::int64_t>(std::floor((x - lower) / bin_width));
    if (bin < 0) bin = 0;
    if (static_cast<std::size_t>(bin) >= counts.size()) counts.resize(static_cast<std::size_t>(bin) + 1, 0);
    ++counts[static_cast<std::size_t>(bin)];
    ++total;
    sum += x;
}

std::optional<double> Histogram::mean() const {
    if (total == 0) return std::nullopt;
    return sum / static_cast<double>(total);
}

PeriodSummary summarize_period(TimePeriod period, std::span<const EpochSnapshot> snapshots, const RingGeometry& ring,
                               const SummaryOptions& opts) {
    PeriodSummary s;
    s.period = period;
    s.gap_histogram = Histogram(0.0, opts.gap_bin_m);
    s.speed_histogram = Histogram(0.0, opts.speed_bin_kmh);
    std::set<VehicleId> vehicles;
    std::uint64_t short_gaps = 0;
    for (const auto& snap : snapshots) {
        for (auto dir : {Direction::Clockwise, Direction::Counterclockwise}) {
            for (const auto& e : snap.entries(dir)) {
                vehicles.insert(e.vehicle_id);
                s.speed_histogram.add(e.speed_mps * 3.6);
            }
            for (double g : inter_vehicle_gaps(snap, dir, ring)) {
                s.gap_histogram.add(g);
                if (g <= opts.short_gap_m) ++short_gaps;
            }
        }
    }
    s.vehicle_count = vehicles.size();
    s.mean_speed_kmh = s.speed_histogram.mean();
    if (s.gap_histogram.total > 0) {
        s.share_gap_le_50m = static_cast<double>(short_gaps) / static_cast<double>(s.gap_histogram.total);
    }
    return s;
}

std::array<std::vector<EpochSnapshot>, 4> group_by_period(std::span<const EpochSnapshot> snapshots) {
    std::array<std::vector<EpochSnapshot>, 4> out;
    for (const auto& snap : snapshots) {
        if (const auto p = bin_time_period(snap.epoch_start)) out[static_cast<std::size_t>(*p)].push_back(snap);
    }
    return out;
}

PipelineResult run_pipeline(const RingGeometry& ring, std::span<const GpsRecord> records, const PipelineOptions& opts) {
    PipelineResult out;
    out.parsed = records.size();
    const auto kept = filter_quality(records, opts.min_quality);
    out.below_quality = records.size() - kept.size();
    auto matched = match_records(ring, kept, opts.max_offset_m);
    out.off_ring = matched.dropped;
    out.tracks = build_tracks(matched.matched);
    for (auto& t : out.tracks) t.direction = classify_direction(t, ring);
    const auto snapshots = epoch_snapshots(out.tracks, opts.epoch_s);
    out.snapshots_by_period = group_by_period(snapshots);
    for (auto p : kAllPeriods) {
        const auto i = static_cast<std::size_t>(p);
        out.summaries[i] = summarize_period(p, out.snapshots_by_period[i], ring, opts.summary);
    }
    return out;
}

std::string format_summaries(std::span<const PeriodSummary> summaries) {
    std::string out = "period,vehicle_count,mean_speed_kmh,share_gap_le_50m,gap_count,speed_count\n";
    for (const auto& s : summaries) {
        out += to_string(s.period);
        out += ',' + std::to_string(s.vehicle_count);
        out += ',' + (s.mean_speed_kmh ? text::fixed(*s.mean_speed_kmh, 6) : std::string("NA"));
        out += ',' + (s.share_gap_le_50m ? text::fixed(*s.share_gap_le_50m, 6) : std::string("NA"));
        out += ',' + std::to_string(s.gap_histogram.total);
        out += ',' + std::to_string(s.speed_histogram.total);
        out += '\n';
    }
    return out;
}

std::string format_histogram(const Histogram& h) {
    std::string out = "lower,upper,count\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        const double lo = h.lower + static_cast<double>(i) * h.bin_width;
        out += text::fixed(lo, 3) + ',' + text::fixed(lo + h.bin_width, 3) + ',' + std::to_string(h.counts[i]) + '\n';
    }
    return out;
}

} // namespace ringcast
