#include "ringcast/metrics.hpp"

#include <algorithm>
#include <sstream>

#include "ringcast/error.hpp"
#include "ringcast/text.hpp"

namespace ringcast {

const char* const kReportHeader = "protocol,seed,duration_s,nodes,messages,pdr,collisions,avg_e2e_s,undelivered_farthest";
const char* const kNodeAppendixHeader = "node_id,deliverable,received";
const char* const kSummaryHeader = "protocol,repetitions,pdr,collisions,avg_e2e_s,undelivered_farthest";

void DeliveryLedger::generated(MessageId id, double t, NodeId farthest) {
    messages_.push_back(GeneratedMessage{id, t, farthest});
}

void DeliveryLedger::received(NodeId node, MessageId msg, double t) { first_rx_.emplace(std::pair{node, msg}, t); }

void DeliveryLedger::record_collision(NodeId, double) { ++collisions_; }

std::optional<double> DeliveryLedger::first_reception(NodeId node, MessageId msg) const {
    const auto it = first_rx_.find({node, msg});
    if (it == first_rx_.end()) return std::nullopt;
    return it->second;
}

PdrResult compute_pdr(const DeliveryLedger& ledger, std::span<const PresenceInterval> presence) {
    PdrResult out;
    double sum = 0.0;
    int eligible = 0;
    for (const auto& p : presence) {
        NodeDelivery nd{p.node, 0, 0};
        for (const auto& m : ledger.messages()) {
            if (p.t_in <= m.t_generated && m.t_generated < p.t_out) {
                ++nd.deliverable;
                if (ledger.has(p.node, m.id)) ++nd.received;
            }
        }
        if (nd.deliverable > 0) {
            sum += static_cast<double>(nd.received) / nd.deliverable;
            ++eligible;
        }
        out.nodes.push_back(nd);
    }
    if (eligible == 0) throw LogicError("NoEligibleNodes", "no node had a deliverable message");
    std::sort(out.nodes.begin(), out.nodes.end(), [](const auto& a, const auto& b) { return a.node < b.node; });
    out.pdr = sum / eligible;
    return out;
}

E2eResult compute_e2e(const DeliveryLedger& ledger) {
    E2eResult out;
    double sum = 0.0;
    for (const auto& m : ledger.messages()) {
        const auto rx = m.farthest < 0 ? std::nullopt : ledger.first_reception(m.farthest, m.id);
        if (rx) {
            sum += *rx - m.t_generated;
            ++out.delivered;
        } else {
            ++out.undelivered;
        }
    }
    if (out.delivered > 0) out.avg_s = sum / out.delivered;
    return out;
}

NodeId farthest_node(std::span<const std::pair<NodeId, double>> distances) {
    NodeId best = -1;
    double best_d = -1.0;
    for (const auto& [id, d] : distances) {
        if (d > best_d || (d == best_d && id < best)) {
            best = id;
            best_d = d;
        }
    }
    return best;
}

namespace {

std::string opt(const std::optional<double>& v, int digits) { return v ? text::fixed(*v, digits) : "NA"; }

} // namespace

std::string format_report_row(const MetricsReport& r) {
    std::ostringstream os;
    os << r.protocol << ',' << r.seed << ',' << text::fixed(r.duration_s, 3) << ',' << r.nodes << ',' << r.messages
       << ',' << opt(r.pdr, 6) << ',' << r.collisions << ',' << opt(r.avg_e2e_s, 6) << ',' << r.undelivered_farthest;
    return os.str();
}

std::string format_report(std::span<const MetricsReport> reports) {
    std::string out = std::string(kReportHeader) + "\n";
    for (const auto& r : reports) out += format_report_row(r) + "\n";
    return out;
}

std::string format_node_appendix(const MetricsReport& r) {
    std::ostringstream os;
    os << kNodeAppendixHeader << '\n';
    for (const auto& n : r.per_node) os << n.node << ',' << n.deliverable << ',' << n.received << '\n';
    return os.str();
}

void emit_report(const MetricsReport& r, const std::string& path, const std::string& appendix_path) {
    text::write_file(path, format_report(std::span<const MetricsReport>(&r, 1)));
    if (!appendix_path.empty()) text::write_file(appendix_path, format_node_appendix(r));
}

MeanSummary summarize(std::span<const MetricsReport> reports) {
    MeanSummary s;
    if (reports.empty()) return s;
    s.protocol = reports.front().protocol;
    s.repetitions = static_cast<int>(reports.size());
    double pdr = 0.0, e2e = 0.0;
    int n_pdr = 0, n_e2e = 0;
    for (const auto& r : reports) {
        if (r.pdr) {
            pdr += *r.pdr;
            ++n_pdr;
        }
        if (r.avg_e2e_s) {
            e2e += *r.avg_e2e_s;
            ++n_e2e;
        }
        s.collisions += static_cast<double>(r.collisions);
        s.undelivered_farthest += r.undelivered_farthest;
    }
    if (n_pdr > 0) s.pdr = pdr / n_pdr;
    if (n_e2e > 0) s.avg_e2e_s = e2e / n_e2e;
    s.collisions /= s.repetitions;
    s.undelivered_farthest /= s.repetitions;
    return s;
}

std::string format_summary(std::span<const MeanSummary> rows) {
    std::ostringstream os;
    os << kSummaryHeader << '\n';
    for (const auto& s : rows) {
        os << s.protocol << ',' << s.repetitions << ',' << opt(s.pdr, 6) << ',' << text::fixed(s.collisions, 3) << ','
           << opt(s.avg_e2e_s, 6) << ',' << text::fixed(s.undelivered_farthest, 3) << '\n';
    }
    return os.str();
}

std::vector<MetricsReport> parse_report(const std::string& contents) {
    std::vector<MetricsReport> out;
    std::istringstream is(contents);
    std::string line;
    int lineno = 0;
    auto bad = [&](const std::string& why) {
        return InputError("MalformedReport", "line " + std::to_string(lineno) + ": " + why);
    };
    while (std::getline(is, line)) {
        ++lineno;
        if (text::is_skippable(line) || text::trim(line) == kReportHeader) continue;
        const auto f = text::split(text::trim(line));
        if (f.size() != 9) throw bad("expected 9 fields");
        MetricsReport r;
        r.protocol = std::string(text::trim(f[0]));
        const auto seed = text::parse_int(f[1]);
        const auto dur = text::parse_double(f[2]);
        const auto nodes = text::parse_int(f[3]);
        const auto msgs = text::parse_int(f[4]);
        const auto coll = text::parse_int(f[6]);
        const auto und = text::parse_int(f[8]);
        if (!seed || !dur || !nodes || !msgs || !coll || !und || *seed < 0 || *coll < 0) throw bad("bad number");
        r.seed = static_cast<std::uint64_t>(*seed);
        r.duration_s = *dur;
        r.nodes = static_cast<int>(*nodes);
        r.messages = static_cast<int>(*msgs);
        r.collisions = static_cast<std::uint64_t>(*coll);
        r.undelivered_farthest = static_cast<int>(*und);
        for (auto [idx, dst] : {std::pair{5, &r.pdr}, std::pair{7, &r.avg_e2e_s}}) {
            if (text::trim(f[idx]) == "NA") continue;
            const auto v = text::parse_double(f[idx]);
            if (!v) throw bad("bad number");
            *dst = *v;
        }
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace ringcast
