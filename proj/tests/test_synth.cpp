#include <doctest.h>

#include <cmath>
#include <set>

#include "ringcast/densify.hpp"
#include "ringcast/error.hpp"
#include "ringcast/synth.hpp"
#include "ringcast/trace.hpp"

using namespace ringcast;

namespace {

SynthParams small(std::vector<int> cw, std::vector<int> ccw) {
    SynthParams p;
    p.circumference_m = 8000.0;
    p.segments = static_cast<int>(cw.size());
    p.counts_cw = std::move(cw);
    p.counts_ccw = std::move(ccw);
    p.seed = 4;
    return p;
}

std::vector<SegmentFlowEstimate> densify_records(const SynthPopulation& pop, const std::vector<GpsRecord>& recs,
                                                 double a) {
    const auto parsed = parse_records(format_records(recs));
    const auto result = run_pipeline(pop.ring, parsed.records, PipelineOptions{});
    return estimate_all(result.snapshots_by_period[static_cast<std::size_t>(TimePeriod::P3)], pop.ring,
                        DensifyParams{pop.h_s, a});
}

} // namespace

TEST_CASE("profile feasibility") {
    CHECK_NOTHROW(check_profile({5, 5, 5, 5}));
    CHECK_NOTHROW(check_profile({0, 0, 0}));
    CHECK_THROWS_AS(check_profile({1, 9, 1, 1}), InputError);
    CHECK_THROWS_AS(check_profile({2, -1, 2}), InputError);
    CHECK_THROWS_AS(synth_population(small({1, 9, 1, 1}, {2, 2, 2, 2})), InputError);
}

TEST_CASE("default profile is bounded and feasible") {
    Rng rng(11);
    for (int i = 0; i < 20; ++i) {
        const auto c = default_profile(29, 5, 60, rng.uniform(0.0, 6.28), rng);
        REQUIRE(c.size() == 29);
        for (int n : c) {
            CHECK(n >= 5);
            CHECK(n <= 60);
        }
        CHECK_NOTHROW(check_profile(c));
    }
}

TEST_CASE("zero densities give empty traces") {
    const auto pop = synth_population(small({0, 0, 0, 0}, {0, 0, 0, 0}));
    CHECK(pop.vehicles.empty());
    CHECK(synth_records(pop, pop.vehicles).empty());
    CHECK(pop.truth.size() == 8);
}

TEST_CASE("truth table layout") {
    SynthParams p;
    p.seed = 2;
    p.counts_cw.assign(29, 0);
    p.counts_ccw.assign(29, 0);
    const auto pop = synth_population(p);
    CHECK(pop.truth.size() == 58);
    CHECK(pop.truth.front().direction == Direction::Clockwise);
    CHECK(pop.truth.front().segment == 1);
    CHECK(pop.truth.back().direction == Direction::Counterclockwise);
    CHECK(pop.truth.back().segment == 29);
    const auto t = format_truth(pop);
    CHECK(std::count(t.begin(), t.end(), '\n') == 59);
}

TEST_CASE("records stay inside the period and are sorted") {
    const auto pop = synth_population(small({4, 6, 3, 5, 4, 5, 2, 3}, {5, 5, 5, 5, 5, 5, 5, 5}));
    const auto recs = synth_records(pop, pop.vehicles);
    REQUIRE_FALSE(recs.empty());
    for (std::size_t i = 0; i < recs.size(); ++i) {
        CHECK(recs[i].t >= pop.period_start);
        CHECK(recs[i].t < pop.period_end);
        if (i > 0) CHECK(recs[i - 1].t <= recs[i].t);
    }
    for (const auto& v : pop.vehicles) {
        CHECK(v.path.size() >= 2);
        CHECK(v.path.size() <= 6);
    }
}

TEST_CASE("densifying the full trace recovers the counts") {
    const std::vector<int> cw{4, 6, 3, 5, 4, 5, 2, 3};
    const std::vector<int> ccw{5, 5, 5, 5, 5, 5, 5, 5};
    const auto pop = synth_population(small(cw, ccw));
    const auto flows = densify_records(pop, synth_records(pop, pop.vehicles), 1.0);
    REQUIRE(flows.size() == pop.truth.size());
    for (std::size_t i = 0; i < flows.size(); ++i) {
        CHECK(flows[i].segment == pop.truth[i].segment);
        CHECK(flows[i].q == doctest::Approx(pop.truth[i].count).epsilon(0.05));
    }
}

TEST_CASE("thinning keeps a binomial share of vehicles") {
    const auto pop = synth_population(small({20, 20, 20, 20, 20, 20, 20, 20}, {20, 20, 20, 20, 20, 20, 20, 20}));
    const double n = static_cast<double>(pop.vehicles.size());
    for (double a : {0.02, 0.1, 0.5}) {
        const auto kept = thin_vehicles(pop, a, 9);
        const double sd = std::sqrt(n * a * (1.0 - a));
        CHECK(std::abs(static_cast<double>(kept.size()) - n * a) <= 4.0 * sd + 1.0);
        std::set<VehicleId> ids;
        for (const auto& v : kept) ids.insert(v.id);
        CHECK(ids.size() == kept.size());
    }
    CHECK(thin_vehicles(pop, 1.0, 9).size() == pop.vehicles.size());
    const auto a = thin_vehicles(pop, 0.3, 5);
    const auto b = thin_vehicles(pop, 0.3, 5);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].id == b[i].id);
}
