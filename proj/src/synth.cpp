#include "ringcast/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ringcast/error.hpp"
#include "ringcast/text.hpp"

namespace ringcast {

void SynthParams::validate() const {
    if (!(circumference_m > 0.0)) throw InputError("InvalidConfig", "circumference must be > 0");
    if (segments < 3) throw InputError("InvalidConfig", "at least 3 segments are required");
    if (min_count < 0 || max_count < min_count) throw InputError("InvalidConfig", "bad count range");
    if (!(h_s > 0.0)) throw InputError("InvalidConfig", "h_s must be > 0");
    for (const auto* c : {&counts_cw, &counts_ccw}) {
        if (!c->empty() && static_cast<int>(c->size()) != segments) {
            throw InputError("InvalidConfig", "count profile length must equal the segment count");
        }
    }
    if (!parse_timestamp(date + "T00:00:00")) throw InputError("InvalidConfig", "bad date '" + date + "'");
}

void check_profile(const std::vector<int>& counts) {
    const auto n = counts.size();
    for (std::size_t j = 0; j < n; ++j) {
        if (counts[j] < 0) throw InputError("InvalidDensity", "negative count on segment " + std::to_string(j + 1));
        const int prev = counts[(j + n - 1) % n];
        const int next = counts[(j + 1) % n];
        if (counts[j] > prev + next) {
            throw InputError("InvalidDensity", "segment " + std::to_string(j + 1) + " count " +
                                                   std::to_string(counts[j]) + " exceeds its neighbours' sum");
        }
    }
}

std::vector<int> default_profile(int segments, int min_count, int max_count, double phase, Rng& rng) {
    const double mid = 0.5 * (min_count + max_count);
    const double amp = 0.4 * (max_count - min_count);
    const double noise = 0.1 * (max_count - min_count);
    std::vector<int> out(static_cast<std::size_t>(segments));
    for (int j = 0; j < segments; ++j) {
        const double x = mid + amp * std::sin(2.0 * std::numbers::pi * j / segments + phase) +
                         rng.uniform(-noise, noise);
        out[static_cast<std::size_t>(j)] = std::clamp(static_cast<int>(std::lround(x)), min_count, max_count);
    }
    // Lower any peak that its neighbours could not feed.
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t j = 0; j < out.size(); ++j) {
            const int cap = out[(j + out.size() - 1) % out.size()] + out[(j + 1) % out.size()];
            if (out[j] > cap) {
                out[j] = cap;
                changed = true;
            }
        }
    }
    return out;
}

namespace {

// Splits each travel-ordered profile into chains of unit slots, then cuts
// chains into conveyors of 2..6 consecutive segments. `order[i]` is the
// segment index (0-based) of the i-th segment along the travel direction.
std::vector<std::vector<int>> conveyors(const std::vector<int>& counts, const std::vector<int>& order, Rng& rng) {
    const int n = static_cast<int>(order.size());
    std::vector<int> N(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) N[static_cast<std::size_t>(i)] = counts[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
    auto at = [&](int i) { return N[static_cast<std::size_t>(((i % n) + n) % n)]; };
    // c[i]: units continuing from position i into i + 1
    std::vector<int> c(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] = std::min(at(i), at(i + 1));
    auto cont = [&](int i) { return c[static_cast<std::size_t>(((i % n) + n) % n)]; };

    std::vector<std::vector<char>> used(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) used[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(at(i)), 0);

    auto next_unit = [&](int i, int u) -> std::optional<std::pair<int, int>> {
        const int first_right = at(i) - cont(i);
        if (u < first_right) return std::nullopt;
        return std::pair{(i + 1) % n, u - first_right};
    };
    auto prev_unit = [&](int i, int u) -> std::optional<std::pair<int, int>> {
        const int p = (i + n - 1) % n;
        if (u >= cont(p)) return std::nullopt;
        return std::pair{p, at(p) - cont(p) + u};
    };

    std::vector<std::vector<int>> chains;
    for (int i = 0; i < n; ++i) {
        for (int u = 0; u < at(i); ++u) {
            if (used[static_cast<std::size_t>(i)][static_cast<std::size_t>(u)]) continue;
            // Walk back to the chain head; a cycle has none.
            int hi = i, hu = u;
            bool cycle = false;
            for (int steps = 0;; ++steps) {
                const auto p = prev_unit(hi, hu);
                if (!p) break;
                if (p->first == i && p->second == u) {
                    cycle = true;
                    break;
                }
                hi = p->first;
                hu = p->second;
                (void)steps;
            }
            std::vector<int> chain;
            int ci = hi, cu = hu;
            while (true) {
                used[static_cast<std::size_t>(ci)][static_cast<std::size_t>(cu)] = 1;
                chain.push_back(ci);
                const auto nx = next_unit(ci, cu);
                if (!nx || used[static_cast<std::size_t>(nx->first)][static_cast<std::size_t>(nx->second)]) break;
                ci = nx->first;
                cu = nx->second;
            }
            if (cycle) {
                // Start the cut at a random point of the cycle.
                const auto shift = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(chain.size()) - 1));
                std::rotate(chain.begin(), chain.begin() + static_cast<std::ptrdiff_t>(shift), chain.end());
            }
            chains.push_back(std::move(chain));
        }
    }

    std::vector<std::vector<int>> out;
    for (const auto& chain : chains) {
        if (chain.size() < 2) throw LogicError("InvalidDensity", "isolated unit in a feasible profile");
        std::size_t pos = 0;
        while (pos < chain.size()) {
            const std::size_t left = chain.size() - pos;
            std::size_t len = left;
            if (left > 6) len = static_cast<std::size_t>(rng.uniform_int(2, static_cast<std::int64_t>(std::min<std::size_t>(6, left - 2))));
            std::vector<int> piece;
            for (std::size_t k = 0; k < len; ++k) piece.push_back(order[static_cast<std::size_t>(chain[pos + k])] + 1);
            out.push_back(std::move(piece));
            pos += len;
        }
    }
    return out;
}

} // namespace

SynthPopulation synth_population(const SynthParams& params) {
    params.validate();
    RngStreams streams(params.seed);
    Rng profile_rng = streams.stream("profile");
    Rng layout_rng = streams.stream("layout");

    SynthPopulation pop;
    pop.ring = make_circular_ring(params.circumference_m, params.segments);
    pop.h_s = params.h_s;
    const auto hours = [&] {
        switch (params.period) {
        case TimePeriod::P1: return 7;
        case TimePeriod::P2: return 11;
        case TimePeriod::P3: return 15;
        case TimePeriod::P4: return 19;
        }
        return 15;
    }();
    pop.period_start = *parse_timestamp(params.date + "T00:00:00") + hours * 3600;
    pop.period_end = pop.period_start + 4 * 3600;

    auto cw = params.counts_cw.empty()
                  ? default_profile(params.segments, params.min_count, params.max_count, 0.0, profile_rng)
                  : params.counts_cw;
    auto ccw = params.counts_ccw.empty() ? default_profile(params.segments, params.min_count, params.max_count,
                                                           std::numbers::pi / 2.0, profile_rng)
                                         : params.counts_ccw;
    check_profile(cw);
    check_profile(ccw);
    for (int j = 1; j <= params.segments; ++j) pop.truth.push_back({Direction::Clockwise, j, cw[static_cast<std::size_t>(j - 1)]});
    for (int j = 1; j <= params.segments; ++j) pop.truth.push_back({Direction::Counterclockwise, j, ccw[static_cast<std::size_t>(j - 1)]});

    const double h = params.h_s;
    const double span = static_cast<double>(pop.period_end - pop.period_start);
    VehicleId next_id = 1;
    for (auto dir : {Direction::Clockwise, Direction::Counterclockwise}) {
        std::vector<int> order(static_cast<std::size_t>(params.segments));
        for (int i = 0; i < params.segments; ++i) {
            order[static_cast<std::size_t>(i)] = dir == Direction::Clockwise ? i : params.segments - 1 - i;
        }
        const auto pieces = conveyors(dir == Direction::Clockwise ? cw : ccw, order, layout_rng);
        for (const auto& piece : pieces) {
            const double tau = layout_rng.uniform() * h;
            const double k = static_cast<double>(piece.size());
            // Earliest injection still on the road at the period start.
            const double n0 = std::floor((-k * h - tau) / h);
            for (double n = n0;; n += 1.0) {
                const double t0 = tau + n * h;
                if (t0 >= span) break;
                if (t0 + k * h <= 0.0) continue;
                const double first = std::ceil(t0) + static_cast<double>(layout_rng.uniform_int(0, static_cast<std::int64_t>(h) - 1));
                // Records at first + i*h for i < k; keep vehicles with one inside the period.
                bool any = false;
                for (std::size_t i = 0; i < piece.size(); ++i) {
                    const double tr = first + static_cast<double>(i) * h;
                    if (tr >= 0.0 && tr < span) any = true;
                }
                const VehicleId id = next_id++;
                if (!any) continue;
                pop.vehicles.push_back(SynthVehicle{id, dir, piece, t0, first});
            }
        }
    }
    std::sort(pop.vehicles.begin(), pop.vehicles.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return pop;
}

std::vector<GpsRecord> synth_records(const SynthPopulation& pop, const std::vector<SynthVehicle>& vehicles) {
    std::vector<GpsRecord> out;
    const double span = static_cast<double>(pop.period_end - pop.period_start);
    for (const auto& v : vehicles) {
        for (std::size_t i = 0; i < v.path.size(); ++i) {
            const double tr = v.first_record + static_cast<double>(i) * pop.h_s;
            if (tr < 0.0 || tr >= span) continue;
            const auto& seg = pop.ring.segment(v.path[i]);
            // Fraction of segment i covered at the record time.
            const double f = (tr - v.t_inject) / pop.h_s - static_cast<double>(i);
            const double arc = v.direction == Direction::Clockwise ? seg.start_arc + f * seg.length
                                                                  : seg.start_arc + (1.0 - f) * seg.length;
            GpsRecord r;
            r.vehicle_id = v.id;
            r.t = pop.period_start + static_cast<Timestamp>(tr);
            r.pos = pop.ring.point_at(arc);
            r.speed_kmh = seg.length / pop.h_s * 3.6;
            r.quality = 1;
            out.push_back(r);
        }
    }
    std::sort(out.begin(), out.end(), [](const GpsRecord& a, const GpsRecord& b) {
        return a.t != b.t ? a.t < b.t : a.vehicle_id < b.vehicle_id;
    });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].record_id = static_cast<std::int64_t>(i + 1);
    return out;
}

std::vector<SynthVehicle> thin_vehicles(const SynthPopulation& pop, double penetration, std::uint64_t seed) {
    if (!(penetration > 0.0 && penetration <= 1.0)) throw InputError("InvalidParams", "penetration must be in (0, 1]");
    Rng rng = RngStreams(seed).stream("thinning");
    std::vector<SynthVehicle> out;
    for (const auto& v : pop.vehicles) {
        if (rng.bernoulli(penetration)) out.push_back(v);
    }
    return out;
}

std::string format_truth(const SynthPopulation& pop) {
    std::string out = "direction,segment,j,count\n";
    for (const auto& t : pop.truth) {
        const auto& seg = pop.ring.segment(t.segment);
        out += std::string(to_string(t.direction)) + "," + pop.ring.exit(seg.start_exit).label + "-" +
               pop.ring.exit(seg.end_exit).label + "," + std::to_string(t.segment) + "," + std::to_string(t.count) + "\n";
    }
    return out;
}

} // namespace ringcast
