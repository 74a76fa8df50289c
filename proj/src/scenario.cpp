#include "ringcast/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>

#include "ringcast/densify.hpp"
#include "ringcast/error.hpp"
#include "ringcast/text.hpp"
#include "ringcast/trace.hpp"

namespace fs = std::filesystem;

namespace ringcast {

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("IoFailure", "cannot create directory '" + dir + "': " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

std::vector<GpsRecord> load_trace(const ScenarioConfig& cfg) {
    if (cfg.trace.empty()) throw InputError("InvalidConfig", "trace is required");
    const auto contents = text::read_file(cfg.trace);
    auto parsed = parse_records(std::string_view(contents));
    if (parsed.records.empty()) throw InputError("EmptyTrace", "no valid records in '" + cfg.trace + "'");
    return std::move(parsed.records);
}

PipelineOptions pipeline_options(const ScenarioConfig& cfg) {
    PipelineOptions o;
    o.min_quality = cfg.min_quality;
    o.max_offset_m = cfg.max_offset_m;
    o.epoch_s = static_cast<Timestamp>(std::lround(cfg.densify.h_s));
    return o;
}

} // namespace

RingGeometry scenario_ring(const ScenarioConfig& cfg) {
    if (!cfg.geometry.empty()) return load_ring(cfg.geometry, cfg.exits, cfg.max_offset_m);
    return make_circular_ring(cfg.ring_circumference_m, cfg.ring_exits);
}

Histogram load_histogram(const std::string& path) {
    const auto contents = text::read_file(path);
    Histogram h;
    bool first = true;
    std::size_t pos = 0;
    int lineno = 0;
    while (pos < contents.size()) {
        const auto nl = contents.find('\n', pos);
        const std::string_view line(contents.data() + pos, (nl == std::string::npos ? contents.size() : nl) - pos);
        pos = nl == std::string::npos ? contents.size() : nl + 1;
        ++lineno;
        if (text::is_skippable(line) || text::trim(line).rfind("lower", 0) == 0) continue;
        const auto bad = InputError("InvalidConfig", path + ":" + std::to_string(lineno) + ": expected lower,upper,count");
        const auto f = text::split(text::trim(line));
        if (f.size() != 3) throw bad;
        const double lo = text::parse_double(f[0]).value_or(0.0);
        const double hi = text::parse_double(f[1]).value_or(0.0);
        const long long n = text::parse_int(f[2]).value_or(-1);
        if (n < 0 || !(hi > lo)) throw bad;
        if (first) {
            h = Histogram(lo, hi - lo);
            first = false;
        }
        h.counts.push_back(static_cast<std::uint64_t>(n));
        h.total += static_cast<std::uint64_t>(n);
    }
    if (first) throw InputError("InvalidConfig", path + ": empty histogram");
    return h;
}

MobilityConfig scenario_mobility(const ScenarioConfig& cfg, const RingGeometry& ring) {
    MobilityConfig mc;
    if (!cfg.flows.empty()) {
        const auto flows = parse_flows(text::read_file(cfg.flows));
        mc.targets = FlowTargets::from_estimates(flows, ring.segment_count());
    } else {
        mc.targets = FlowTargets::uniform_total(ring.segment_count(), cfg.vehicles);
    }
    if (cfg.speed_kmh) {
        mc.speed = SpeedSampler::fixed(*cfg.speed_kmh / 3.6);
    } else if (!cfg.speed_hist.empty()) {
        mc.speed = SpeedSampler::from_histogram(load_histogram(cfg.speed_hist));
    } else {
        mc.speed = SpeedSampler::uniform(cfg.speed_min_kmh / 3.6, cfg.speed_max_kmh / 3.6);
    }
    mc.trip = TripSampler{cfg.trip_min_exits, cfg.trip_max_exits};
    mc.seed = cfg.seed;
    return mc;
}

SimulationSetup scenario_setup(const ScenarioConfig& cfg, const RingGeometry& ring, std::uint64_t seed) {
    cfg.validate();
    if (cfg.rsu_exit > ring.exit_count()) {
        throw InputError("InvalidConfig", "rsu_exit " + std::to_string(cfg.rsu_exit) + " does not exist");
    }
    SimulationSetup s;
    s.ring = &ring;
    s.rsu_arc = ring.exit(cfg.rsu_exit).arc;
    s.mobility = scenario_mobility(cfg, ring);
    s.channel = cfg.channel;
    s.protocol = cfg.protocol;
    s.rsu_period_s = cfg.rsu_period_s;
    s.msg_size_bits = cfg.msg_size_bits;
    s.duration_s = cfg.duration_s;
    s.seed = seed;
    s.event_log = cfg.event_log;
    return s;
}

void cmd_analyze(const ScenarioConfig& cfg) {
    const auto ring = scenario_ring(cfg);
    const auto records = load_trace(cfg);
    const auto result = run_pipeline(ring, records, pipeline_options(cfg));
    ensure_dir(cfg.out);
    text::write_file(join(cfg.out, "summary.csv"), format_summaries(result.summaries));
    for (const auto& s : result.summaries) {
        const std::string p = to_string(s.period);
        text::write_file(join(cfg.out, "hist_" + p + "_gap.csv"), format_histogram(s.gap_histogram));
        text::write_file(join(cfg.out, "hist_" + p + "_speed.csv"), format_histogram(s.speed_histogram));
    }
}

void cmd_densify(const ScenarioConfig& cfg) {
    cfg.densify.validate();
    const auto ring = scenario_ring(cfg);
    const auto records = load_trace(cfg);
    const auto result = run_pipeline(ring, records, pipeline_options(cfg));
    const auto& snaps = result.snapshots_by_period[static_cast<std::size_t>(cfg.period)];
    const auto flows = estimate_all(snaps, ring, cfg.densify);
    ensure_dir(cfg.out);
    text::write_file(join(cfg.out, "flows.csv"), format_flows(flows, ring));
}

void cmd_synth(const SynthCommand& cmd, const std::string& out_dir) {
    const auto pop = synth_population(cmd.params);
    ensure_dir(out_dir);
    write_vertices(join(out_dir, "geometry.csv"), pop.ring.vertices());
    write_exits(join(out_dir, "exits.csv"), pop.ring);
    text::write_file(join(out_dir, "truth.csv"), format_truth(pop));
    text::write_file(join(out_dir, "full_trace.csv"), format_records(synth_records(pop, pop.vehicles)));
    const auto probes = thin_vehicles(pop, cmd.penetration, cmd.thinning_seed);
    text::write_file(join(out_dir, "probe_trace.csv"), format_records(synth_records(pop, probes)));
}

std::vector<MetricsReport> cmd_simulate(const ScenarioConfig& cfg) {
    cfg.validate();
    const auto ring = scenario_ring(cfg);
    ensure_dir(cfg.out);
    text::write_file(join(cfg.out, "effective_config.txt"), cfg.echo());
    std::vector<MetricsReport> reports;
    for (int r = 0; r < cfg.repetitions; ++r) {
        const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(r);
        const auto setup = scenario_setup(cfg, ring, seed);
        const auto result = run_simulation(setup);
        const std::string tag = "seed" + std::to_string(seed);
        emit_report(result.report, join(cfg.out, "report_" + tag + ".csv"), join(cfg.out, "nodes_" + tag + ".csv"));
        if (cfg.event_log) text::write_file(join(cfg.out, "events_" + tag + ".csv"), result.event_log);
        if (cfg.mobility_dump_s > 0.0) {
            text::write_file(join(cfg.out, "mobility_" + tag + ".csv"),
                             format_mobility_dump(result.timeline, ring, cfg.duration_s, cfg.mobility_dump_s));
        }
        reports.push_back(result.report);
    }
    const auto summary = summarize(reports);
    text::write_file(join(cfg.out, "summary.csv"), format_summary(std::span<const MeanSummary>(&summary, 1)));
    return reports;
}

std::vector<MeanSummary> cmd_report(const std::string& dir) {
    if (!fs::is_directory(dir)) throw InputError("UnreadableFile", "'" + dir + "' is not a directory");
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (name.rfind("report_", 0) == 0 && entry.path().extension() == ".csv") files.push_back(entry.path().string());
    }
    if (files.empty()) throw InputError("UnreadableFile", "no report_*.csv files in '" + dir + "'");
    std::map<std::string, std::vector<MetricsReport>> by_protocol;
    for (const auto& f : files) {
        for (auto& r : parse_report(text::read_file(f))) by_protocol[r.protocol].push_back(std::move(r));
    }
    std::vector<MeanSummary> rows;
    for (auto& [proto, reports] : by_protocol) {
        std::sort(reports.begin(), reports.end(), [](const auto& a, const auto& b) { return a.seed < b.seed; });
        rows.push_back(summarize(reports));
    }
    text::write_file(join(dir, "summary.csv"), format_summary(rows));
    return rows;
}

} // namespace ringcast
