// Batch campaigns: generate -> profile -> inject -> gentests -> detect ->
// report, with per-instance artifacts and a reproducible result matrix.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hwt/detect.hpp"
#include "hwt/netlist.hpp"
#include "hwt/rarity.hpp"
#include "hwt/trojan.hpp"

namespace hwt {

struct BenchmarkSpec {
    std::string path;  // takes precedence when non-empty
    BenchmarkKind kind = BenchmarkKind::SboxNetwork;
    int width = 32;
    std::uint64_t seed = 1;
};

struct ProfilingSpec {
    std::uint64_t samples = 100000;
    std::uint64_t seed = 11;
    double rare_threshold = 0.1;
};

struct InstanceGroup {
    TrojanKind kind = TrojanKind::Troll;
    int trigger_bits = 8;  // troll: cube width; node kinds: conjunct count q
    int count = 1;
    std::uint64_t seed = 1;

    std::string label() const;
};

struct StrategySpec {
    std::string name;  // random | stat | clique | evolved_stat | evolved_clique | sat
    std::string polarity = "rare";
    std::uint64_t budget = 10000;
    std::uint64_t n_detect = 1000;
    std::uint64_t pool_factor = 4;
    std::size_t max_targets = 64;
    std::uint64_t iteration_budget = 10000;
    double time_budget_seconds = 600.0;
    std::uint64_t seed = 1;
};

struct CampaignConfig {
    int version = 1;
    BenchmarkSpec benchmark;
    ProfilingSpec profiling;
    std::uint64_t trigger_samples = 10000;  // sample-set size for trigger selection
    int payload_outputs = 8;
    std::vector<InstanceGroup> instances;
    std::vector<StrategySpec> strategies;
    int workers = 1;
};

CampaignConfig config_from_json_text(const std::string& text);
CampaignConfig config_from_file(const std::string& path);
std::string config_to_json_text(const CampaignConfig& c);
std::string config_hash(const CampaignConfig& c);  // hex FNV-1a64 of the canonical form

struct CellStats {
    int total = 0;
    int detected = 0;
    double mean_queries_to_detect = 0.0;  // over detected instances
    double mean_wall_seconds = 0.0;       // over all instances
    int cause_early_exit = 0;
    int cause_unsat = 0;
    int cause_budget = 0;  // iteration/time/query budgets together

    double percent() const { return total == 0 ? 0.0 : 100.0 * detected / total; }
};

struct ResultMatrix {
    std::string benchmark;
    std::vector<std::string> strategies;    // row order
    std::vector<std::string> groups;        // column order
    std::map<std::pair<std::string, std::string>, CellStats> cells;  // (strategy, group)

    const CellStats& at(const std::string& strategy, const std::string& group) const;
};

// include_wall=false yields the byte-comparable form of the CSV.
std::string matrix_to_csv(const ResultMatrix& m, bool include_wall = true);
std::string matrix_to_json_text(const ResultMatrix& m);

struct InstanceRecord {
    std::string id;     // <group>_i<index>
    std::string group;  // column label
    TrojanInstance instance;
};

// Stage functions; cmd_campaign composes exactly these.
Netlist stage_generate(const CampaignConfig& config);
SignalProfile stage_profile(const Netlist& golden, const ProfilingSpec& spec);
std::vector<InstanceRecord> stage_inject(const Netlist& golden, const SignalProfile& profile,
                                         const CampaignConfig& config);
std::map<std::string, TestSet> stage_gentests(const Netlist& golden, const SignalProfile& profile,
                                              const CampaignConfig& config);
struct DetectOutcome {
    std::string instance_id;
    std::string group;
    std::string strategy;
    DetectionReport report;
};
std::vector<DetectOutcome> stage_detect(const Netlist& golden,
                                        const std::vector<InstanceRecord>& instances,
                                        const std::map<std::string, TestSet>& testsets,
                                        const CampaignConfig& config);
ResultMatrix stage_report(const std::string& benchmark_name, const CampaignConfig& config,
                          const std::vector<DetectOutcome>& outcomes);

// Full pipeline; when out_dir is non-empty all artifacts are written there
// (benchmark.bench, profile.csv, instances/, sidecars/, tests/, reports/,
// matrix.csv, matrix.json, manifest.json).
ResultMatrix run_campaign(const CampaignConfig& config, const std::string& out_dir);

// Aggregation over per-instance report JSON files (cmd_report).
ResultMatrix aggregate_reports(const std::string& benchmark_name, const CampaignConfig& config,
                               const std::string& reports_dir);

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace hwt
