#include "ringcast/simulation.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "ringcast/error.hpp"
#include "ringcast/text.hpp"

namespace ringcast {

const char* const kEventLogHeader = "t,kind,node,msg,hop,detail";

int rsu_message_count(double period_s, double duration_s) {
    if (!(period_s > 0.0) || duration_s < period_s) return 0;
    return static_cast<int>(std::floor(duration_s / period_s + 1e-9));
}

void SimulationSetup::validate() const {
    channel.validate();
    protocol.validate(channel.radio_range_m);
    if (!(rsu_period_s > 0.0)) throw InputError("InvalidConfig", "rsu_period_s must be > 0");
    if (msg_size_bits <= 0) throw InputError("InvalidConfig", "msg_size_bits must be > 0");
    if (!(duration_s > 0.0)) throw InputError("InvalidConfig", "duration_s must be > 0");
    if (ring == nullptr && (mobility || distance == DistanceModel::Chord)) {
        throw InputError("InvalidConfig", "a ring geometry is required");
    }
    std::set<NodeId> ids;
    for (const auto& n : static_nodes) {
        if (n.id <= kRsuId || !ids.insert(n.id).second) {
            throw InputError("InvalidConfig", "static node ids must be unique and > 0");
        }
    }
    if (mobility) mobility->validate(*ring);
}

namespace {

class PositionView : public NodeView {
public:
    PositionView(const MobilityTimeline* timeline, const std::map<NodeId, double>* fixed, const RingGeometry* ring,
                 DistanceModel model)
        : timeline_(timeline), fixed_(fixed), ring_(ring), model_(model) {}

    std::vector<NodeId> present_nodes(double t) const override {
        std::vector<NodeId> out;
        for (const auto& [id, arc] : *fixed_) out.push_back(id);
        if (timeline_ != nullptr) {
            for (const auto& e : timeline_->entries()) {
                if (e.t_inject <= t && t < e.t_extract) out.push_back(e.start.id);
            }
        }
        return out;  // fixed ids are below every vehicle id, entries are ordered by id
    }

    bool is_present(NodeId id, double t) const override {
        if (fixed_->count(id) != 0) return true;
        return timeline_ != nullptr && timeline_->contains(id) && timeline_->present(id, t);
    }

    double arc_of(NodeId id, double t) const override {
        if (const auto it = fixed_->find(id); it != fixed_->end()) return it->second;
        if (timeline_ == nullptr || !timeline_->contains(id)) {
            throw LogicError("UnknownNode", "node " + std::to_string(id) + " does not exist");
        }
        return timeline_->arc_at(id, t, *ring_);
    }

    double distance(NodeId a, NodeId b, double t) const override { return between(arc_of(a, t), arc_of(b, t)); }

    double between(double a, double b) const {
        if (model_ == DistanceModel::Line) return std::abs(a - b);
        return ring_->chord_distance(a, b);
    }

    // Distance along the road, used to pick the farthest node.
    double road(double a, double b) const {
        if (model_ == DistanceModel::Line) return std::abs(a - b);
        return ring_->ring_distance(a, b);
    }

private:
    const MobilityTimeline* timeline_;
    const std::map<NodeId, double>* fixed_;
    const RingGeometry* ring_;
    DistanceModel model_;
};

std::string t9(double t) { return text::fixed(t, 9); }

class Engine {
public:
    explicit Engine(const SimulationSetup& s)
        : s_(s),
          streams_(s.seed),
          proto_rng_(streams_.stream("protocol")),
          chan_rng_(streams_.stream("channel")),
          fixed_(make_fixed(s)),
          view_(nullptr, &fixed_, s.ring, s.distance),
          channel_(s.channel, view_) {
        if (s.mobility) {
            MobilityConfig mc = *s.mobility;
            mc.seed = s.seed;
            NodeId first = 1;
            for (const auto& n : s.static_nodes) first = std::max(first, n.id + 1);
            mobility_.emplace(std::move(mc), *s.ring, streams_.stream("mobility"), first);
            view_ = PositionView(&mobility_->timeline(), &fixed_, s.ring, s.distance);
        }
    }

    SimulationResult run() {
        if (s_.event_log) log_ << kEventLogHeader << '\n';
        if (mobility_) mobility_->start(sched_, 0.0);
        const int count = rsu_message_count(s_.rsu_period_s, s_.duration_s);
        for (int k = 1; k <= count; ++k) {
            SimEvent e;
            e.time = k * s_.rsu_period_s;
            e.kind = EventKind::MessageGenerate;
            e.node = kRsuId;
            e.msg = k;
            sched_.schedule(e);
        }
        sched_.run_until(s_.duration_s, [this](const SimEvent& e) { handle(e); });
        return finish();
    }

private:
    static std::map<NodeId, double> make_fixed(const SimulationSetup& s) {
        std::map<NodeId, double> m;
        m[kRsuId] = s.rsu_arc;
        for (const auto& n : s.static_nodes) m[n.id] = n.arc;
        return m;
    }

    void log(double t, const char* kind, NodeId node, MessageId msg, int hop, const std::string& detail) {
        if (!s_.event_log) return;
        log_ << t9(t) << ',' << kind << ',' << node << ',' << msg << ',' << hop << ',' << detail << '\n';
    }

    void handle(const SimEvent& e) {
        switch (e.kind) {
        case EventKind::MessageGenerate: generate(e); break;
        case EventKind::TransmitAttempt: attempt(e.node, e.msg, e.hop, e.time); break;
        case EventKind::TransmitEnd: transmit_end(e); break;
        case EventKind::TimerFired: timer(e); break;
        case EventKind::VehicleExtract: extract(e); break;
        case EventKind::Probe: break;
        }
    }

    void generate(const SimEvent& e) {
        std::vector<std::pair<NodeId, double>> dist;
        for (NodeId id : view_.present_nodes(e.time)) {
            if (id != kRsuId) dist.emplace_back(id, view_.road(s_.rsu_arc, view_.arc_of(id, e.time)));
        }
        const NodeId far = farthest_node(dist);
        ledger_.generated(e.msg, e.time, far);
        log(e.time, "generate", kRsuId, e.msg, 0, "farthest=" + std::to_string(far));
        attempt(kRsuId, e.msg, 0, e.time);
    }

    void attempt(NodeId node, MessageId msg, int hop, double now) {
        if (!view_.is_present(node, now)) {
            log(now, "drop", node, msg, hop, "absent");
            return;
        }
        if (const auto busy = channel_.busy_until(node, now)) {
            SimEvent retry;
            retry.time = *busy + chan_rng_.uniform_open_closed(s_.channel.cs_jitter_max_s);
            retry.kind = EventKind::TransmitAttempt;
            retry.node = node;
            retry.msg = msg;
            retry.hop = hop;
            sched_.schedule(retry);
            log(now, "defer", node, msg, hop, "retry=" + t9(retry.time));
            return;
        }
        const auto started = channel_.start(node, msg, hop, s_.msg_size_bits, now);
        const Frame& f = *started.frame;
        frames_.push_back(FrameRecord{f.id, node, msg, hop, f.t_start, f.t_end, f.receivers});
        ++transmissions_[{node, msg}];
        log(now, "tx_start", node, msg, hop,
            "frame=" + std::to_string(f.id) + " end=" + t9(f.t_end) + " rx=" + std::to_string(f.receivers.size()));
        for (NodeId r : started.new_collisions) {
            ledger_.record_collision(r, now);
            log(now, "collision", r, msg, hop, "frame=" + std::to_string(f.id));
        }
        SimEvent end;
        end.time = f.t_end;
        end.kind = EventKind::TransmitEnd;
        end.node = node;
        end.msg = msg;
        end.hop = hop;
        end.ref = f.id;
        sched_.schedule(end);
    }

    void transmit_end(const SimEvent& e) {
        const auto deliveries = channel_.finish(e.ref, e.time);
        log(e.time, "tx_end", e.node, e.msg, e.hop,
            "frame=" + std::to_string(e.ref) + " delivered=" + std::to_string(deliveries.size()));
        for (const auto& d : deliveries) {
            ledger_.received(d.receiver, e.msg, e.time);
            if (d.receiver == kRsuId) continue;
            const ReceptionContext ctx{d.receiver, e.node, d.distance_m, e.hop};
            const auto act = on_receive(states_[d.receiver], e.msg, ctx, s_.protocol, e.time, proto_rng_);
            const std::pair key{d.receiver, e.msg};
            if (act.kind == ProtocolAction::Kind::ScheduleForward) {
                SimEvent t;
                t.time = act.fire_time;
                t.kind = EventKind::TimerFired;
                t.node = d.receiver;
                t.msg = e.msg;
                t.hop = e.hop;
                timers_[key] = sched_.schedule(t);
                log(e.time, "rx", d.receiver, e.msg, e.hop, "from=" + std::to_string(e.node) + " fire=" + t9(act.fire_time));
            } else if (act.kind == ProtocolAction::Kind::CancelPending) {
                sched_.cancel(timers_.at(key));
                timers_.erase(key);
                log(e.time, "rx", d.receiver, e.msg, e.hop, "from=" + std::to_string(e.node) + " suppress");
            } else {
                log(e.time, "rx", d.receiver, e.msg, e.hop, "from=" + std::to_string(e.node));
            }
        }
    }

    void timer(const SimEvent& e) {
        const auto act = on_timer_fired(states_[e.node], e.msg, e.time);
        timers_.erase({e.node, e.msg});
        log(e.time, "timer", e.node, e.msg, act.hop_count, "forward");
        attempt(e.node, e.msg, act.hop_count, e.time);
    }

    void extract(const SimEvent& e) {
        auto it = timers_.lower_bound({e.node, std::numeric_limits<MessageId>::min()});
        while (it != timers_.end() && it->first.first == e.node) {
            sched_.cancel(it->second);
            it = timers_.erase(it);
        }
        const auto fresh = mobility_->on_extract(sched_, e);
        log(e.time, "extract", e.node, -1, 0, "replacement=" + std::to_string(fresh.id));
    }

    SimulationResult finish() {
        SimulationResult r;
        std::vector<PresenceInterval> presence;
        for (const auto& [id, arc] : fixed_) {
            if (id != kRsuId) presence.push_back({id, 0.0, std::numeric_limits<double>::infinity()});
        }
        if (mobility_) {
            for (const auto& en : mobility_->timeline().entries()) {
                presence.push_back({en.start.id, en.t_inject, en.t_extract});
            }
        }
        auto& rep = r.report;
        rep.protocol = to_string(s_.protocol.kind);
        rep.seed = s_.seed;
        rep.duration_s = s_.duration_s;
        rep.nodes = static_cast<int>(presence.size());
        rep.messages = static_cast<int>(ledger_.messages().size());
        rep.collisions = channel_.collisions();
        if (ledger_.collisions() != channel_.collisions()) {
            throw LogicError("CollisionMismatch", "ledger and channel collision counts differ");
        }
        if (!presence.empty() && rep.messages > 0) {
            try {
                auto pdr = compute_pdr(ledger_, presence);
                rep.pdr = pdr.pdr;
                rep.per_node = std::move(pdr.nodes);
            } catch (const LogicError& err) {
                if (err.code() != "NoEligibleNodes") throw;
            }
        }
        const auto e2e = compute_e2e(ledger_);
        rep.avg_e2e_s = e2e.avg_s;
        rep.delivered_farthest = e2e.delivered;
        rep.undelivered_farthest = e2e.undelivered;

        r.ledger = std::move(ledger_);
        r.event_log = log_.str();
        r.frames = std::move(frames_);
        if (mobility_) r.timeline = mobility_->timeline();
        r.fixed_arcs = fixed_;
        r.transmissions = std::move(transmissions_);
        r.executed_events = sched_.executed();
        return r;
    }

    const SimulationSetup& s_;
    Scheduler sched_;
    RngStreams streams_;
    Rng proto_rng_;
    Rng chan_rng_;
    std::map<NodeId, double> fixed_;
    std::optional<MobilityProcess> mobility_;
    PositionView view_;
    Channel channel_;
    std::map<NodeId, NodeProtocolState> states_;
    std::map<std::pair<NodeId, MessageId>, EventId> timers_;
    DeliveryLedger ledger_;
    std::vector<FrameRecord> frames_;
    std::map<std::pair<NodeId, MessageId>, int> transmissions_;
    std::ostringstream log_;
};

} // namespace

SimulationResult run_simulation(const SimulationSetup& setup) {
    setup.validate();
    Engine engine(setup);
    return engine.run();
}

RunPositions::RunPositions(const SimulationResult& r, const SimulationSetup& setup) : r_(&r), s_(&setup) {}

std::vector<NodeId> RunPositions::present_nodes(double t) const {
    return PositionView(&r_->timeline, &r_->fixed_arcs, s_->ring, s_->distance).present_nodes(t);
}

bool RunPositions::is_present(NodeId id, double t) const {
    return PositionView(&r_->timeline, &r_->fixed_arcs, s_->ring, s_->distance).is_present(id, t);
}

double RunPositions::arc_of(NodeId id, double t) const {
    return PositionView(&r_->timeline, &r_->fixed_arcs, s_->ring, s_->distance).arc_of(id, t);
}

double RunPositions::distance(NodeId a, NodeId b, double t) const {
    return PositionView(&r_->timeline, &r_->fixed_arcs, s_->ring, s_->distance).distance(a, b, t);
}

} // namespace ringcast
