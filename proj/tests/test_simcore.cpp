#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ringcast/channel.hpp"
#include "ringcast/error.hpp"
#include "ringcast/rng.hpp"
#include "ringcast/scheduler.hpp"
#include "support.hpp"

using namespace ringcast;

namespace {

SimEvent at(double t, NodeId node = 0) {
    SimEvent e;
    e.time = t;
    e.node = node;
    return e;
}

} // namespace

TEST_CASE("equal-time events run in insertion order") {
    Scheduler s;
    for (NodeId i = 0; i < 5; ++i) s.schedule(at(1.0, i));
    std::vector<NodeId> order;
    s.run_until(2.0, [&](const SimEvent& e) { order.push_back(e.node); });
    CHECK(order == std::vector<NodeId>{0, 1, 2, 3, 4});
    CHECK(s.now() == 2.0);
}

TEST_CASE("scheduling in the past is rejected") {
    Scheduler s;
    s.run_until(5.0, [](const SimEvent&) {});
    try {
        s.schedule(at(4.0));
        FAIL("expected PastEvent");
    } catch (const Error& e) {
        CHECK(e.code() == "PastEvent");
    }
}

TEST_CASE("empty queue just advances the clock") {
    Scheduler s;
    int n = 0;
    s.run_until(100.0, [&](const SimEvent&) { ++n; });
    CHECK(n == 0);
    CHECK(s.now() == 100.0);
}

TEST_CASE("interleaved scheduling matches a sorted reference") {
    Scheduler s;
    Rng rng(17);
    std::vector<std::pair<double, EventId>> expected;
    std::vector<std::pair<double, EventId>> seen;
    for (int i = 0; i < 200; ++i) {
        const double t = rng.uniform(0.0, 10.0);
        expected.emplace_back(t, s.schedule(at(t)));
    }
    s.run_until(20.0, [&](const SimEvent& e) {
        seen.emplace_back(e.time, e.seq);
        if (seen.size() < 400) {
            SimEvent child = at(e.time + rng.uniform(0.0, 5.0));
            const auto id = s.schedule(child);
            if (child.time <= 20.0) expected.emplace_back(child.time, id);
        }
    });
    std::sort(expected.begin(), expected.end());
    CHECK(seen == expected);
    for (std::size_t i = 1; i < seen.size(); ++i) CHECK(seen[i - 1].first <= seen[i].first);
}

TEST_CASE("cancelled events never run") {
    Scheduler s;
    const auto a = s.schedule(at(1.0, 1));
    s.schedule(at(2.0, 2));
    s.cancel(a);
    std::vector<NodeId> ran;
    s.run_until(3.0, [&](const SimEvent& e) { ran.push_back(e.node); });
    CHECK(ran == std::vector<NodeId>{2});
}

TEST_CASE("airtime") {
    ChannelConfig c;
    CHECK(c.airtime(2000) == 0.0125);
    CHECK(c.bitrate_bps == 160000.0);
}

TEST_CASE("lone transmitter: one reception, no collision") {
    fixture::LineView view({{1, 0.0}, {2, 200.0}});
    Channel ch(ChannelConfig{}, view);
    const auto st = ch.start(1, 1, 0, 2000, 0.0);
    CHECK(st.frame->t_end - st.frame->t_start == 0.0125);
    const auto d = ch.finish(st.frame->id, st.frame->t_end);
    REQUIRE(d.size() == 1);
    CHECK(d[0].receiver == 2);
    CHECK(d[0].distance_m == 200.0);
    CHECK(ch.collisions() == 0);
}

TEST_CASE("hidden terminals destroy both frames at the common receiver") {
    fixture::LineView view({{1, 0.0}, {2, 250.0}, {3, 500.0}});
    Channel ch(ChannelConfig{}, view);
    CHECK_FALSE(ch.busy_until(3, 0.001).has_value());  // 1 is out of 3's range
    const auto a = ch.start(1, 1, 0, 2000, 0.0);
    CHECK_FALSE(ch.busy_until(3, 0.001).has_value());
    const auto b = ch.start(3, 2, 0, 2000, 0.001);
    CHECK(b.new_collisions == std::vector<NodeId>{2});
    CHECK(ch.finish(a.frame->id, 0.0125).empty());
    CHECK(ch.finish(b.frame->id, 0.0135).empty());
    CHECK(ch.collisions() == 1);

    // A second, disjoint overlap at the same receiver is a second episode.
    const auto c = ch.start(1, 3, 0, 2000, 1.0);
    const auto d = ch.start(3, 4, 0, 2000, 1.005);
    ch.finish(c.frame->id, 1.0125);
    ch.finish(d.frame->id, 1.0175);
    CHECK(ch.collisions() == 2);
}

TEST_CASE("three overlapping frames form one episode") {
    fixture::LineView view({{1, 0.0}, {2, 250.0}, {3, 500.0}, {4, 260.0}});
    ChannelConfig cfg;
    Channel ch(cfg, view);
    ch.start(1, 1, 0, 2000, 0.0);
    ch.start(3, 2, 0, 2000, 0.010);
    ch.start(1, 3, 0, 2000, 0.0124);  // own earlier frame still on air: half duplex at 1 only
    CHECK(ch.collisions() == 2);      // receivers 2 and 4
}

TEST_CASE("touching frames do not collide") {
    fixture::LineView view({{1, 0.0}, {2, 250.0}, {3, 500.0}});
    Channel ch(ChannelConfig{}, view);
    const auto a = ch.start(1, 1, 0, 2000, 0.0);
    const auto b = ch.start(3, 2, 0, 2000, 0.0125);
    CHECK(ch.finish(a.frame->id, 0.0125).size() == 1);
    CHECK(ch.finish(b.frame->id, 0.025).size() == 1);
    CHECK(ch.collisions() == 0);
}

TEST_CASE("carrier sense defers neighbours until the frame ends") {
    fixture::LineView view({{1, 0.0}, {2, 100.0}});
    Channel ch(ChannelConfig{}, view);
    ch.start(1, 1, 0, 2000, 0.0);
    REQUIRE(ch.busy_until(2, 0.005).has_value());
    CHECK(*ch.busy_until(2, 0.005) == 0.0125);
    CHECK(*ch.busy_until(1, 0.005) == 0.0125);
    CHECK_FALSE(ch.busy_until(2, 0.0125).has_value());

    ChannelConfig ideal;
    ideal.collisions = false;
    Channel free(ideal, view);
    free.start(1, 1, 0, 2000, 0.0);
    CHECK_FALSE(free.busy_until(2, 0.005).has_value());
}

TEST_CASE("a transmitting node misses overlapping frames without a collision") {
    fixture::LineView view({{1, 0.0}, {2, 100.0}, {3, 1000.0}});
    Channel ch(ChannelConfig{}, view);
    const auto a = ch.start(1, 1, 0, 2000, 0.0);
    const auto b = ch.start(2, 2, 0, 2000, 0.0);  // same instant: no sensing possible
    CHECK(ch.finish(a.frame->id, 0.0125).empty());
    CHECK(ch.finish(b.frame->id, 0.0125).empty());
    CHECK(ch.collisions() == 0);
}

TEST_CASE("neighbours use a closed ball") {
    fixture::LineView view({{1, 0.0}, {2, 300.0}, {3, 300.0001}});
    Channel ch(ChannelConfig{}, view);
    CHECK(ch.neighbors(1, 0.0) == std::vector<NodeId>{2});
    CHECK(ch.neighbors(2, 0.0) == std::vector<NodeId>{1, 3});
    fixture::LineView same({{1, 42.0}, {2, 42.0}});
    Channel ch2(ChannelConfig{}, same);
    CHECK(ch2.neighbors(1, 0.0) == std::vector<NodeId>{2});
    CHECK(ch2.neighbors(2, 0.0) == std::vector<NodeId>{1});
}

TEST_CASE("unknown sender") {
    fixture::LineView view({{1, 0.0}});
    Channel ch(ChannelConfig{}, view);
    try {
        ch.start(9, 1, 0, 2000, 0.0);
        FAIL("expected UnknownNode");
    } catch (const Error& e) {
        CHECK(e.code() == "UnknownNode");
    }
}
