#include "ringcast/config.hpp"

#include <charconv>
#include <functional>
#include <limits>
#include <sstream>

#include "ringcast/error.hpp"
#include "ringcast/text.hpp"

namespace ringcast {

namespace {

std::string num(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

InputError bad(std::string_view key, std::string_view value, std::string_view why) {
    return InputError("InvalidConfig", std::string(key) + " = '" + std::string(value) + "': " + std::string(why));
}

double as_double(std::string_view key, std::string_view v) {
    const auto d = text::parse_double(v);
    if (!d) throw bad(key, v, "expected a number");
    return *d;
}

int as_int(std::string_view key, std::string_view v) {
    const auto i = text::parse_int(v);
    if (!i || *i < std::numeric_limits<int>::min() || *i > std::numeric_limits<int>::max()) {
        throw bad(key, v, "expected an integer");
    }
    return static_cast<int>(*i);
}

bool as_bool(std::string_view key, std::string_view v) {
    if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
    if (v == "off" || v == "false" || v == "0" || v == "no") return false;
    throw bad(key, v, "expected on or off");
}

struct Key {
    const char* name;
    std::function<void(ScenarioConfig&, std::string_view)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

#define RC_STR(field) \
    [](ScenarioConfig& c, std::string_view v) { c.field = std::string(v); }, [](const ScenarioConfig& c) { return c.field; }
#define RC_DBL(name, field)                                                        \
    [](ScenarioConfig& c, std::string_view v) { c.field = as_double(name, v); }, \
        [](const ScenarioConfig& c) { return num(c.field); }
#define RC_INT(name, field)                                                     \
    [](ScenarioConfig& c, std::string_view v) { c.field = as_int(name, v); }, \
        [](const ScenarioConfig& c) { return std::to_string(c.field); }

const std::vector<Key>& keys() {
    static const std::vector<Key> table = {
        {"geometry", RC_STR(geometry)},
        {"exits", RC_STR(exits)},
        {"ring_circumference_m", RC_DBL("ring_circumference_m", ring_circumference_m)},
        {"ring_exits", RC_INT("ring_exits", ring_exits)},
        {"trace", RC_STR(trace)},
        {"period",
         [](ScenarioConfig& c, std::string_view v) {
             const auto p = parse_period(v);
             if (!p) throw bad("period", v, "expected P1, P2, P3 or P4");
             c.period = *p;
         },
         [](const ScenarioConfig& c) { return std::string(to_string(c.period)); }},
        {"min_quality", RC_INT("min_quality", min_quality)},
        {"max_offset_m", RC_DBL("max_offset_m", max_offset_m)},
        {"h_s", RC_DBL("h_s", densify.h_s)},
        {"penetration", RC_DBL("penetration", densify.penetration)},
        {"flows", RC_STR(flows)},
        {"vehicles", RC_INT("vehicles", vehicles)},
        {"speed_kmh",
         [](ScenarioConfig& c, std::string_view v) {
             if (v.empty() || v == "none") {
                 c.speed_kmh.reset();
             } else {
                 c.speed_kmh = as_double("speed_kmh", v);
             }
         },
         [](const ScenarioConfig& c) { return c.speed_kmh ? num(*c.speed_kmh) : std::string("none"); }},
        {"speed_min_kmh", RC_DBL("speed_min_kmh", speed_min_kmh)},
        {"speed_max_kmh", RC_DBL("speed_max_kmh", speed_max_kmh)},
        {"speed_hist", RC_STR(speed_hist)},
        {"trip_min_exits", RC_INT("trip_min_exits", trip_min_exits)},
        {"trip_max_exits", RC_INT("trip_max_exits", trip_max_exits)},
        {"bitrate_bps", RC_DBL("bitrate_bps", channel.bitrate_bps)},
        {"radio_range_m", RC_DBL("radio_range_m", channel.radio_range_m)},
        {"cs_jitter_s", RC_DBL("cs_jitter_s", channel.cs_jitter_max_s)},
        {"cs_delay_s", RC_DBL("cs_delay_s", channel.cs_delay_s)},
        {"collisions", [](ScenarioConfig& c, std::string_view v) { c.channel.collisions = as_bool("collisions", v); },
         [](const ScenarioConfig& c) { return std::string(c.channel.collisions ? "on" : "off"); }},
        {"protocol",
         [](ScenarioConfig& c, std::string_view v) {
             const auto k = parse_protocol(v);
             if (!k) throw bad("protocol", v, "expected flooding, dbf, dbf_hc or rnd");
             c.protocol.kind = *k;
         },
         [](const ScenarioConfig& c) { return std::string(to_string(c.protocol.kind)); }},
        {"t_max_s", RC_DBL("t_max_s", protocol.t_max_s)},
        {"r_max_m", RC_DBL("r_max_m", protocol.r_max_m)},
        {"rnd_max_s", RC_DBL("rnd_max_s", protocol.rnd_max_s)},
        {"flood_jitter_s", RC_DBL("flood_jitter_s", protocol.flood_jitter_max_s)},
        {"rsu_period_s", RC_DBL("rsu_period_s", rsu_period_s)},
        {"rsu_exit", RC_INT("rsu_exit", rsu_exit)},
        {"msg_size_bits", RC_INT("msg_size_bits", msg_size_bits)},
        {"duration_s", RC_DBL("duration_s", duration_s)},
        {"seed",
         [](ScenarioConfig& c, std::string_view v) {
             const auto i = text::parse_int(v);
             if (!i || *i < 0) throw bad("seed", v, "expected a non-negative integer");
             c.seed = static_cast<std::uint64_t>(*i);
         },
         [](const ScenarioConfig& c) { return std::to_string(c.seed); }},
        {"repetitions", RC_INT("repetitions", repetitions)},
        {"out", RC_STR(out)},
        {"event_log", [](ScenarioConfig& c, std::string_view v) { c.event_log = as_bool("event_log", v); },
         [](const ScenarioConfig& c) { return std::string(c.event_log ? "on" : "off"); }},
        {"mobility_dump_s", RC_DBL("mobility_dump_s", mobility_dump_s)},
    };
    return table;
}

#undef RC_STR
#undef RC_DBL
#undef RC_INT

} // namespace

std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const auto& k : keys()) out.emplace_back(k.name);
    return out;
}

void ScenarioConfig::set(std::string_view key, std::string_view value) {
    value = text::trim(value);
    for (const auto& k : keys()) {
        if (key == k.name) {
            k.set(*this, value);
            return;
        }
    }
    throw InputError("InvalidConfig", "unknown key '" + std::string(key) + "'");
}

void ScenarioConfig::validate() const {
    auto fail = [](const std::string& msg) { return InputError("InvalidConfig", msg); };
    if (geometry.empty() != exits.empty()) throw fail("geometry and exits must be given together");
    if (geometry.empty()) {
        if (!(ring_circumference_m > 0.0)) throw fail("ring_circumference_m must be > 0");
        if (ring_exits < 2) throw fail("ring_exits must be >= 2");
    }
    if (min_quality < 0) throw fail("min_quality must be >= 0");
    if (!(max_offset_m > 0.0)) throw fail("max_offset_m must be > 0");
    densify.validate();
    if (vehicles < 0) throw fail("vehicles must be >= 0");
    if (speed_kmh && !(*speed_kmh > 0.0)) throw fail("speed_kmh must be > 0");
    if (!(speed_min_kmh > 0.0) || speed_max_kmh < speed_min_kmh) {
        throw fail("speed_min_kmh must be > 0 and <= speed_max_kmh");
    }
    if (trip_min_exits < 1 || trip_max_exits < trip_min_exits) {
        throw fail("trip_min_exits must be >= 1 and <= trip_max_exits");
    }
    channel.validate();
    protocol.validate(channel.radio_range_m);
    if (!(rsu_period_s > 0.0)) throw fail("rsu_period_s must be > 0");
    if (rsu_exit < 1) throw fail("rsu_exit must be >= 1");
    if (msg_size_bits <= 0) throw fail("msg_size_bits must be > 0");
    if (!(duration_s > 0.0)) throw fail("duration_s must be > 0");
    if (repetitions < 1) throw fail("repetitions must be >= 1");
    if (mobility_dump_s < 0.0) throw fail("mobility_dump_s must be >= 0");
}

std::string ScenarioConfig::echo() const {
    std::ostringstream os;
    os << "# effective configuration\n";
    for (const auto& k : keys()) os << k.name << " = " << k.get(*this) << '\n';
    return os.str();
}

ScenarioConfig parse_config(std::string_view contents, ScenarioConfig base) {
    std::size_t pos = 0;
    int lineno = 0;
    while (pos <= contents.size()) {
        const auto nl = contents.find('\n', pos);
        std::string_view line = contents.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? contents.size() + 1 : nl + 1;
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = text::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw InputError("InvalidConfig", "line " + std::to_string(lineno) + ": expected key = value");
        }
        try {
            base.set(text::trim(line.substr(0, eq)), line.substr(eq + 1));
        } catch (const InputError& e) {
            throw InputError("InvalidConfig", "line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return base;
}

ScenarioConfig load_config(const std::string& path) { return parse_config(text::read_file(path)); }

void apply_override(ScenarioConfig& cfg, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw InputError("InvalidConfig", "override '" + std::string(assignment) + "' is not key=value");
    }
    cfg.set(text::trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

} // namespace ringcast
