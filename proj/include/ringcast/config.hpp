// Scenario configuration: a flat `key = value` file with `#` comments.
// Every key has a default; unknown keys and bad values are rejected with
// the offending key named.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ringcast/channel.hpp"
#include "ringcast/densify.hpp"
#include "ringcast/protocols.hpp"
#include "ringcast/trace.hpp"

namespace ringcast {

struct ScenarioConfig {
    // Ring: from files when `geometry` is set, otherwise a circular ring.
    std::string geometry;
    std::string exits;
    double ring_circumference_m = 10000.0;
    int ring_exits = 29;

    // Trace analysis and densification.
    std::string trace;
    TimePeriod period = TimePeriod::P3;
    int min_quality = 1;
    double max_offset_m = 100.0;
    DensifyParams densify;

    // Vehicle population: per-segment flows from a file, else `vehicles`
    // spread evenly over both directions.
    std::string flows;
    int vehicles = 150;
    std::optional<double> speed_kmh;  // fixed speed when set
    double speed_min_kmh = 50.0;
    double speed_max_kmh = 80.0;
    std::string speed_hist;  // `lower,upper,count` km/h histogram file
    int trip_min_exits = 1;
    int trip_max_exits = 5;

    ChannelConfig channel;
    ProtocolParams protocol;

    double rsu_period_s = 1.0;
    int rsu_exit = 19;
    int msg_size_bits = 2000;

    double duration_s = 100.0;
    std::uint64_t seed = 1;
    int repetitions = 1;
    std::string out = "out";
    bool event_log = false;
    double mobility_dump_s = 0.0;  // 0 disables the dump

    // Throws InputError("InvalidConfig") naming the key.
    void set(std::string_view key, std::string_view value);
    // Cross-field checks. Throws InputError("InvalidConfig").
    void validate() const;
    // Every key with its effective value, in a fixed order.
    std::string echo() const;
};

std::vector<std::string> config_keys();

// Throws InputError("InvalidConfig") with the line number.
ScenarioConfig parse_config(std::string_view text, ScenarioConfig base = {});
ScenarioConfig load_config(const std::string& path);

// `key=value` override as given on the command line.
void apply_override(ScenarioConfig& cfg, std::string_view assignment);

} // namespace ringcast
