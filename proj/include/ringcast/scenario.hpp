// Batch commands shared by the command-line front-end: trace analysis,
// densification, synthetic traces, protocol simulation and report merging.
// Every command writes into an output directory and is deterministic.

#pragma once

#include <string>
#include <vector>

#include "ringcast/config.hpp"
#include "ringcast/metrics.hpp"
#include "ringcast/mobility.hpp"
#include "ringcast/ring_geometry.hpp"
#include "ringcast/simulation.hpp"
#include "ringcast/synth.hpp"

namespace ringcast {

RingGeometry scenario_ring(const ScenarioConfig& cfg);
MobilityConfig scenario_mobility(const ScenarioConfig& cfg, const RingGeometry& ring);
// `ring` must outlive the returned setup.
SimulationSetup scenario_setup(const ScenarioConfig& cfg, const RingGeometry& ring, std::uint64_t seed);

// Reads a `lower,upper,count` histogram file (km/h).
Histogram load_histogram(const std::string& path);

// Writes summary.csv and hist_<period>_{gap,speed}.csv.
void cmd_analyze(const ScenarioConfig& cfg);
// Writes flows.csv for cfg.period.
void cmd_densify(const ScenarioConfig& cfg);

struct SynthCommand {
    SynthParams params;
    double penetration = 0.02;
    std::uint64_t thinning_seed = 1;
};
// Writes geometry.csv, exits.csv, truth.csv, full_trace.csv, probe_trace.csv.
void cmd_synth(const SynthCommand& cmd, const std::string& out_dir);

// Runs cfg.repetitions seeds (seed + r); writes report_seed<S>.csv,
// nodes_seed<S>.csv, optional events/mobility files, summary.csv and
// effective_config.txt. Returns the per-repetition reports in seed order.
std::vector<MetricsReport> cmd_simulate(const ScenarioConfig& cfg);

// Merges every report_*.csv in `dir` into `dir`/summary.csv, one row per protocol.
std::vector<MeanSummary> cmd_report(const std::string& dir);

} // namespace ringcast
