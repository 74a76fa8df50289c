#include <doctest.h>

#include "ringcast/densify.hpp"
#include "ringcast/error.hpp"
#include "ringcast/rng.hpp"

using namespace ringcast;

TEST_CASE("single-segment estimates") {
    const DensifyParams p{30.0, 0.02};
    auto e = estimate_segment({}, 600.0, p);
    CHECK(e.n == 0);
    CHECK(e.m == 0.0);
    CHECK(e.q == 0.0);

    const std::vector<ProbeSignal> one{{1, 20.0}};
    e = estimate_segment(one, 600.0, p);
    CHECK(e.n == 1);
    CHECK(e.m == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e.q == doctest::Approx(50.0).epsilon(1e-12));

    const std::vector<ProbeSignal> three{{1, 10.0}, {2, 20.0}, {3, 30.0}};
    e = estimate_segment(three, 900.0, DensifyParams{30.0, 1.0});
    CHECK(e.m == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(e.q == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("invalid parameters") {
    const std::vector<ProbeSignal> one{{1, 20.0}};
    for (const auto& p : {DensifyParams{0.0, 0.02}, DensifyParams{30.0, 0.0}, DensifyParams{30.0, 1.5}}) {
        try {
            estimate_segment(one, 600.0, p);
            FAIL("expected InvalidParams");
        } catch (const Error& err) {
            CHECK(err.code() == "InvalidParams");
        }
    }
    CHECK_THROWS_AS(estimate_segment(one, 0.0, DensifyParams{}), InputError);
}

TEST_CASE("linearity, scale law and monotonicity") {
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        std::vector<ProbeSignal> s;
        const int n = static_cast<int>(rng.uniform_int(0, 20));
        for (int k = 0; k < n; ++k) s.push_back({k, rng.uniform(0.0, 40.0)});
        const double L = rng.uniform(100.0, 3000.0);
        const DensifyParams p{rng.uniform(1.0, 60.0), rng.uniform(0.001, 1.0)};
        const auto e1 = estimate_segment(s, L, p);
        const auto e2 = estimate_segment(s, L, DensifyParams{2.0 * p.h_s, p.penetration});
        CHECK(e2.m == doctest::Approx(2.0 * e1.m).epsilon(1e-12));
        CHECK(e1.q * p.penetration == doctest::Approx(e1.m).epsilon(1e-12));
        s.push_back({99, 0.5});
        CHECK(estimate_segment(s, L, p).m > e1.m);
    }
}

TEST_CASE("estimate_all averages per-epoch estimates") {
    const auto g = make_circular_ring(29000.0, 29);
    const DensifyParams p{30.0, 1.0};
    EpochSnapshot a, b;
    const double mid = g.segment(3).start_arc + 10.0;
    a.clockwise = {SnapshotEntry{1, mid, g.segment(3).length / 30.0}};
    b.clockwise = {};
    const auto one = estimate_all(std::vector<EpochSnapshot>{a}, g, p);
    REQUIRE(one.size() == 58);
    int nonzero = 0;
    for (const auto& e : one) nonzero += e.m != 0.0;
    CHECK(nonzero == 1);
    CHECK(one[2].m == doctest::Approx(1.0));
    CHECK(one[2].q == one[2].m);
    const auto two = estimate_all(std::vector<EpochSnapshot>{a, b}, g, p);
    CHECK(two[2].m == doctest::Approx(0.5));
    CHECK(two[2].n == 1);
    CHECK(two[29].direction == Direction::Counterclockwise);
    CHECK(two[29].segment == 1);

    const auto empty = estimate_all(std::vector<EpochSnapshot>{}, g, DensifyParams{});
    for (const auto& e : empty) CHECK(e.q == 0.0);
}

TEST_CASE("flow table round trip") {
    const auto g = make_circular_ring(29000.0, 29);
    EpochSnapshot a;
    a.counterclockwise = {SnapshotEntry{1, g.segment(5).start_arc + 1.0, 20.0}};
    const auto flows = estimate_all(std::vector<EpochSnapshot>{a}, g, DensifyParams{});
    const auto text = format_flows(flows, g);
    CHECK(text.rfind("direction,segment,j,n_j,m_j,q_j,L_j\n", 0) == 0);
    const auto back = parse_flows(text);
    REQUIRE(back.size() == flows.size());
    CHECK(back[29 + 4].q == doctest::Approx(flows[29 + 4].q).epsilon(1e-6));
    CHECK(back[29 + 4].direction == Direction::Counterclockwise);
}
