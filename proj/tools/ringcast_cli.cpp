// ringcast command-line front-end.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "ringcast/config.hpp"
#include "ringcast/error.hpp"
#include "ringcast/scenario.hpp"
#include "ringcast/text.hpp"

using namespace ringcast;

namespace {

struct CommonFlags {
    std::string config;
    std::vector<std::string> sets;
    std::string out;
    std::string trace;
    std::string geometry;
    std::string exits;
    std::string period;
    long long seed = -1;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool trace_flags) {
    cmd->add_option("--config", f.config, "key = value scenario file");
    cmd->add_option("--set", f.sets, "override a config key (key=value), repeatable");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--seed", f.seed, "root seed");
    cmd->add_option("--geometry", f.geometry, "ring vertex file");
    cmd->add_option("--exits", f.exits, "ring exit file");
    if (trace_flags) {
        cmd->add_option("--trace", f.trace, "GPS trace file");
        cmd->add_option("--period", f.period, "time period P1..P4");
    }
}

ScenarioConfig resolve(const CommonFlags& f) {
    ScenarioConfig cfg = f.config.empty() ? ScenarioConfig{} : load_config(f.config);
    if (!f.geometry.empty()) cfg.set("geometry", f.geometry);
    if (!f.exits.empty()) cfg.set("exits", f.exits);
    if (!f.trace.empty()) cfg.set("trace", f.trace);
    if (!f.period.empty()) cfg.set("period", f.period);
    if (!f.out.empty()) cfg.set("out", f.out);
    if (f.seed >= 0) cfg.set("seed", std::to_string(f.seed));
    for (const auto& s : f.sets) apply_override(cfg, s);
    cfg.validate();
    return cfg;
}

std::vector<int> parse_counts(const std::string& list) {
    std::vector<int> out;
    if (list.empty()) return out;
    for (auto field : text::split(list, ',')) {
        const auto v = text::parse_int(field);
        if (!v) throw InputError("InvalidDensity", "bad count '" + std::string(field) + "'");
        out.push_back(static_cast<int>(*v));
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ring-highway VANET simulator and GPS trace analytics"};
    app.require_subcommand(1);

    CommonFlags analyze_f, densify_f, sim_f;
    auto* analyze = app.add_subcommand("analyze", "gap and speed distributions per time period");
    add_common(analyze, analyze_f, true);
    auto* densify = app.add_subcommand("densify", "per-segment vehicle estimates from probe traces");
    add_common(densify, densify_f, true);
    auto* simulate = app.add_subcommand("simulate", "run a protocol scenario");
    add_common(simulate, sim_f, false);

    SynthCommand synth_cmd;
    std::string synth_out = "synth";
    std::string counts_cw, counts_ccw;
    long long synth_seed = 1, thin_seed = 1;
    auto* synth = app.add_subcommand("synth", "synthetic traces with known per-segment counts");
    synth->add_option("--out", synth_out, "output directory");
    synth->add_option("--seed", synth_seed, "population seed");
    synth->add_option("--thin-seed", thin_seed, "probe thinning seed");
    synth->add_option("--penetration", synth_cmd.penetration, "probe share a");
    synth->add_option("--circumference", synth_cmd.params.circumference_m, "ring length in meters");
    synth->add_option("--segments", synth_cmd.params.segments, "number of exits and segments");
    synth->add_option("--counts-cw", counts_cw, "clockwise counts, comma separated");
    synth->add_option("--counts-ccw", counts_ccw, "counterclockwise counts, comma separated");

    std::string report_dir;
    auto* report = app.add_subcommand("report", "merge per-repetition reports into summary.csv");
    report->add_option("dir", report_dir, "directory holding report_*.csv")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*analyze) {
            cmd_analyze(resolve(analyze_f));
        } else if (*densify) {
            cmd_densify(resolve(densify_f));
        } else if (*simulate) {
            const auto reports = cmd_simulate(resolve(sim_f));
            std::cout << format_report(reports);
        } else if (*synth) {
            if (synth_seed < 0 || thin_seed < 0) throw InputError("InvalidConfig", "seeds must be >= 0");
            synth_cmd.params.seed = static_cast<std::uint64_t>(synth_seed);
            synth_cmd.thinning_seed = static_cast<std::uint64_t>(thin_seed);
            synth_cmd.params.counts_cw = parse_counts(counts_cw);
            synth_cmd.params.counts_ccw = parse_counts(counts_ccw);
            cmd_synth(synth_cmd, synth_out);
        } else if (*report) {
            std::cout << format_summary(cmd_report(report_dir));
        }
    } catch (const Error& e) {
        std::cerr << "ringcast: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "ringcast: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
