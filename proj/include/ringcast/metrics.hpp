// Per-run delivery bookkeeping and the comparison metrics: packet delivery
// ratio, delay to the farthest node and MAC collision count.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ringcast/scheduler.hpp"

namespace ringcast {

struct GeneratedMessage {
    MessageId id = 0;
    double t_generated = 0.0;
    NodeId farthest = -1;  // -1 when no node was present
};

class DeliveryLedger {
public:
    void generated(MessageId id, double t, NodeId farthest);
    // Keeps the first reception time of each (node, message).
    void received(NodeId node, MessageId msg, double t);
    void record_collision(NodeId receiver, double t);

    const std::vector<GeneratedMessage>& messages() const { return messages_; }
    std::optional<double> first_reception(NodeId node, MessageId msg) const;
    bool has(NodeId node, MessageId msg) const { return first_rx_.count({node, msg}) != 0; }
    std::uint64_t collisions() const { return collisions_; }

private:
    std::vector<GeneratedMessage> messages_;
    std::map<std::pair<NodeId, MessageId>, double> first_rx_;
    std::uint64_t collisions_ = 0;
};

// Node on the ring during [t_in, t_out).
struct PresenceInterval {
    NodeId node = 0;
    double t_in = 0.0;
    double t_out = 0.0;
};

struct NodeDelivery {
    NodeId node = 0;
    int deliverable = 0;  // messages generated while present
    int received = 0;     // of those, received at least once
};

struct PdrResult {
    double pdr = 0.0;
    std::vector<NodeDelivery> nodes;  // ascending id, eligible or not
};

// Unweighted mean of received/deliverable over nodes with >= 1 deliverable
// message. Throws LogicError("NoEligibleNodes").
PdrResult compute_pdr(const DeliveryLedger& ledger, std::span<const PresenceInterval> presence);

struct E2eResult {
    std::optional<double> avg_s;
    int delivered = 0;
    int undelivered = 0;
};

E2eResult compute_e2e(const DeliveryLedger& ledger);

// Node with the largest distance; ties go to the smaller id. -1 if empty.
NodeId farthest_node(std::span<const std::pair<NodeId, double>> distances);

struct MetricsReport {
    std::string protocol;
    std::uint64_t seed = 0;
    double duration_s = 0.0;
    int nodes = 0;      // distinct non-RSU nodes present at any time
    int messages = 0;
    std::optional<double> pdr;  // absent when no node was eligible
    std::uint64_t collisions = 0;
    std::optional<double> avg_e2e_s;
    int delivered_farthest = 0;
    int undelivered_farthest = 0;
    std::vector<NodeDelivery> per_node;
};

extern const char* const kReportHeader;
extern const char* const kNodeAppendixHeader;
extern const char* const kSummaryHeader;

std::string format_report_row(const MetricsReport& r);
std::string format_report(std::span<const MetricsReport> reports);
std::string format_node_appendix(const MetricsReport& r);
// Writes the report and, if `appendix_path` is non-empty, the per-node rows.
// Throws InputError("IoFailure").
void emit_report(const MetricsReport& r, const std::string& path, const std::string& appendix_path = {});

// Mean over repetitions of one protocol; absent values are skipped.
struct MeanSummary {
    std::string protocol;
    int repetitions = 0;
    std::optional<double> pdr;
    double collisions = 0.0;
    std::optional<double> avg_e2e_s;
    double undelivered_farthest = 0.0;
};

MeanSummary summarize(std::span<const MetricsReport> reports);
std::string format_summary(std::span<const MeanSummary> rows);

// Reads rows written by format_report. Throws InputError("MalformedReport").
std::vector<MetricsReport> parse_report(const std::string& text);

} // namespace ringcast
