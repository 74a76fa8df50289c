#include <doctest.h>

#include "ringcast/error.hpp"
#include "ringcast/protocols.hpp"
#include "ringcast/simulation.hpp"
#include "support.hpp"

using namespace ringcast;

TEST_CASE("dbf delay endpoints and midpoint") {
    const ProtocolParams p;  // T_max 0.5 s, R_max 300 m
    CHECK(dbf_delay(0.0, p) == 0.5);
    CHECK(dbf_delay(300.0, p) == 0.0);
    CHECK(dbf_delay(150.0, p) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(dbf_delay(450.0, p) == 0.0);
}

TEST_CASE("rnd delays are uniform on [0, 0.1]") {
    const ProtocolParams p;
    Rng rng(21);
    double sum = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double d = rnd_delay(rng, p);
        CHECK(d >= 0.0);
        CHECK(d <= 0.1);
        sum += d;
    }
    CHECK(std::abs(sum / 10000.0 - 0.05) < 0.003);
    Rng a(3), b(3);
    for (int i = 0; i < 10; ++i) CHECK(rnd_delay(a, p) == rnd_delay(b, p));
}

TEST_CASE("parameter validation") {
    ProtocolParams p;
    CHECK_NOTHROW(p.validate(300.0));
    CHECK_THROWS_AS(p.validate(301.0), InputError);
    p.t_max_s = 0.0;
    CHECK_THROWS_AS(p.validate(300.0), InputError);
}

TEST_CASE("state machine reactions") {
    Rng rng(1);
    for (auto kind : {ProtocolKind::Flooding, ProtocolKind::Dbf, ProtocolKind::DbfHopCount, ProtocolKind::Rnd}) {
        ProtocolParams p;
        p.kind = kind;
        NodeProtocolState st;
        const auto first = on_receive(st, 1, ReceptionContext{5, 0, 100.0, 0}, p, 1.0, rng);
        CHECK(first.kind == ProtocolAction::Kind::ScheduleForward);
        CHECK(first.fire_time >= 1.0);
        CHECK(st.status(1) == MessageStatus::Pending);
        const auto tx = on_timer_fired(st, 1, first.fire_time);
        CHECK(tx.hop_count == 1);
        CHECK(st.status(1) == MessageStatus::Forwarded);
        // Duplicates after forwarding change nothing.
        CHECK(on_receive(st, 1, ReceptionContext{5, 7, 10.0, 3}, p, 2.0, rng).kind == ProtocolAction::Kind::None);
        CHECK(st.status(1) == MessageStatus::Forwarded);
        CHECK_THROWS_AS(on_timer_fired(st, 1, first.fire_time), LogicError);
    }
}

TEST_CASE("duplicates while pending") {
    Rng rng(1);
    ProtocolParams p;
    p.kind = ProtocolKind::Dbf;
    NodeProtocolState st;
    on_receive(st, 1, ReceptionContext{5, 0, 100.0, 2}, p, 0.0, rng);
    CHECK(on_receive(st, 1, ReceptionContext{5, 6, 100.0, 2}, p, 0.1, rng).kind ==
          ProtocolAction::Kind::CancelPending);
    CHECK(st.status(1) == MessageStatus::Suppressed);
    CHECK_THROWS_AS(on_timer_fired(st, 1, 1.0 / 3.0), LogicError);

    p.kind = ProtocolKind::DbfHopCount;
    NodeProtocolState hc;
    on_receive(hc, 1, ReceptionContext{5, 0, 100.0, 2}, p, 0.0, rng);
    CHECK(on_receive(hc, 1, ReceptionContext{5, 6, 100.0, 2}, p, 0.1, rng).kind == ProtocolAction::Kind::None);
    CHECK(on_receive(hc, 1, ReceptionContext{5, 6, 100.0, 1}, p, 0.1, rng).kind == ProtocolAction::Kind::None);
    CHECK(hc.status(1) == MessageStatus::Pending);
    CHECK(on_receive(hc, 1, ReceptionContext{5, 6, 100.0, 3}, p, 0.1, rng).kind ==
          ProtocolAction::Kind::CancelPending);

    p.kind = ProtocolKind::Flooding;
    NodeProtocolState fl;
    on_receive(fl, 1, ReceptionContext{5, 0, 100.0, 2}, p, 0.0, rng);
    CHECK(on_receive(fl, 1, ReceptionContext{5, 6, 100.0, 3}, p, 0.0, rng).kind == ProtocolAction::Kind::None);
    CHECK(fl.status(1) == MessageStatus::Pending);

    p.kind = ProtocolKind::Rnd;
    NodeProtocolState rn;
    on_receive(rn, 1, ReceptionContext{5, 0, 100.0, 0}, p, 0.0, rng);
    CHECK(on_receive(rn, 1, ReceptionContext{5, 6, 100.0, 1}, p, 0.0, rng).kind ==
          ProtocolAction::Kind::CancelPending);
}

TEST_CASE("two pending messages keep independent timers") {
    Rng rng(2);
    ProtocolParams p;
    p.kind = ProtocolKind::Dbf;
    NodeProtocolState st;
    const auto a = on_receive(st, 1, ReceptionContext{5, 0, 150.0, 0}, p, 0.0, rng);
    const auto b = on_receive(st, 2, ReceptionContext{5, 0, 0.0, 4}, p, 0.2, rng);
    CHECK(st.pending_count() == 2);
    CHECK(on_timer_fired(st, 1, a.fire_time).hop_count == 1);
    CHECK(st.status(2) == MessageStatus::Pending);
    CHECK(on_timer_fired(st, 2, b.fire_time).hop_count == 5);
    CHECK(b.fire_time == doctest::Approx(0.7));
}

TEST_CASE("dbf chain: the farther receiver forwards first and inhibits the nearer one") {
    // RSU at 0, B at 100, C at 250; both in the RSU's range, C farther.
    auto s = fixture::line_setup({100.0, 250.0}, ProtocolKind::Dbf, 1.5, 1.0);
    const auto r = run_simulation(s);
    const double c_fire = 1.0 + 0.0125 + 0.5 * (1.0 - 250.0 / 300.0);
    CHECK(r.transmissions.count({2, 1}) == 1);
    CHECK(r.transmissions.count({1, 1}) == 0);
    REQUIRE(r.frames.size() == 2);
    CHECK(r.frames[1].sender == 2);
    CHECK(r.frames[1].t_start == doctest::Approx(c_fire).epsilon(1e-12));
    CHECK(r.frames[1].hop == 1);
}

TEST_CASE("co-located forwarders stall plain dbf but not the hop-count variant") {
    // RSU at 0, B1 and B2 both at 250, C at 500, D at 750; R = 300.
    const std::vector<double> arcs{250.0, 250.0, 500.0, 750.0};
    const auto dbf = run_simulation(fixture::line_setup(arcs, ProtocolKind::Dbf, 1.9, 1.0));
    const auto hc = run_simulation(fixture::line_setup(arcs, ProtocolKind::DbfHopCount, 1.9, 1.0));
    CHECK(dbf.ledger.has(3, 1));
    CHECK_FALSE(dbf.ledger.has(4, 1));
    for (NodeId n = 1; n <= 4; ++n) CHECK(hc.ledger.has(n, 1));
    CHECK(*hc.report.pdr == 1.0);
}

TEST_CASE("rsu message schedule") {
    CHECK(rsu_message_count(1.0, 100.0) == 100);
    CHECK(rsu_message_count(150.0, 100.0) == 0);
    CHECK(rsu_message_count(0.3, 1.0) == 3);
    const auto r = run_simulation(fixture::line_setup({100.0}, ProtocolKind::Flooding, 10.0, 1.0));
    const auto& msgs = r.ledger.messages();
    REQUIRE(msgs.size() == 10);
    for (std::size_t i = 1; i < msgs.size(); ++i) {
        CHECK(msgs[i].id > msgs[i - 1].id);
        CHECK(msgs[i].t_generated > msgs[i - 1].t_generated);
    }
    CHECK(msgs.front().t_generated == 1.0);
}

TEST_CASE("hop counts grow along every delivered path") {
    std::vector<double> arcs;
    for (int k = 1; k <= 10; ++k) arcs.push_back(250.0 * k);
    for (auto kind : {ProtocolKind::Flooding, ProtocolKind::Dbf, ProtocolKind::DbfHopCount, ProtocolKind::Rnd}) {
        const auto r = run_simulation(fixture::line_setup(arcs, kind, 5.0, 2.0));
        for (const auto& f : r.frames) {
            if (f.sender == kRsuId) {
                CHECK(f.hop == 0);
            } else {
                CHECK(f.hop == f.sender);  // node k sits k hops out
            }
        }
    }
}
