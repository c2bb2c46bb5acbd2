// hwt: gate-level hardware-Trojan workbench.
//
// Verbs: gen, profile, inject, gentests, detect, campaign, report.
// Exit codes: 0 success, 2 configuration error, 3 stage failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hwt/campaign.hpp"
#include "hwt/detect.hpp"
#include "hwt/netlist.hpp"
#include "hwt/rarity.hpp"
#include "hwt/rng.hpp"
#include "hwt/sim.hpp"
#include "hwt/trojan.hpp"

namespace fs = std::filesystem;
using namespace hwt;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;

struct StageFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int run_gen(const std::string& kind_name, int width, std::uint64_t seed, const std::string& out) {
    BenchmarkKind kind;
    if (!benchmark_kind_from_name(kind_name, kind)) {
        std::cerr << "unknown benchmark kind: " << kind_name << "\n";
        return kExitConfig;
    }
    Netlist n = gen_benchmark(kind, width, seed);
    if (out.empty())
        std::cout << emit_bench(n);
    else
        emit_bench_file(n, out);
    std::cerr << "generated " << n.name << ": " << n.inputs.size() << " inputs, "
              << n.outputs.size() << " outputs, " << n.gates.size() << " gates\n";
    return 0;
}

int run_profile(const std::string& bench, std::uint64_t samples, std::uint64_t seed,
                const std::string& out) {
    Netlist n = parse_bench_file(bench);
    SignalProfile p = profile_signals(n, samples, seed);
    if (out.empty())
        std::cout << profile_to_csv(p);
    else
        profile_to_csv_file(p, out);
    return 0;
}

int run_inject(const std::string& bench, const std::string& profile_path, const std::string& kind_name,
               int trigger_bits, int count, std::uint64_t seed, std::uint64_t trigger_samples,
               double threshold, int payload_outputs, const std::string& out_dir,
               std::string sidecar_dir) {
    TrojanKind kind;
    if (!trojan_kind_from_name(kind_name, kind)) {
        std::cerr << "unknown trojan kind: " << kind_name << "\n";
        return kExitConfig;
    }
    if (sidecar_dir.empty()) sidecar_dir = (fs::path(out_dir).parent_path() / "sidecars").string();
    const auto canon_out = fs::weakly_canonical(out_dir);
    const auto canon_side = fs::weakly_canonical(sidecar_dir);
    auto inside = [](const fs::path& p, const fs::path& dir) {
        auto rel = p.lexically_relative(dir);
        return !rel.empty() && rel.native().rfind("..", 0) != 0;
    };
    if (canon_side == canon_out || inside(canon_side, canon_out)) {
        std::cerr << "refusing to write sidecars into the detection input directory ("
                  << canon_out.string() << "); detectors must not see ground truth\n";
        return kExitConfig;
    }

    Netlist golden = parse_bench_file(bench);
    SignalProfile profile = profile_from_csv_file(profile_path);

    CampaignConfig cfg;
    cfg.benchmark.path = bench;
    cfg.profiling.rare_threshold = threshold;
    cfg.trigger_samples = trigger_samples;
    cfg.payload_outputs = payload_outputs;
    cfg.instances.push_back({kind, trigger_bits, count, seed});

    std::vector<InstanceRecord> records = stage_inject(golden, profile, cfg);
    fs::create_directories(out_dir);
    fs::create_directories(sidecar_dir);
    for (const auto& rec : records) {
        emit_bench_file(rec.instance.infected, (fs::path(out_dir) / (rec.id + ".bench")).string());
        std::ofstream side(fs::path(sidecar_dir) / (rec.id + ".json"));
        side << sidecar_to_json(rec.instance);
    }
    std::cerr << "wrote " << records.size() << " instances to " << out_dir << "\n";
    return 0;
}

int run_gentests(const std::string& bench, const std::string& profile_path,
                 const std::string& strategy, const std::string& polarity, std::uint64_t budget,
                 std::uint64_t n_detect, double threshold, std::uint64_t seed,
                 const std::string& out) {
    Netlist golden = parse_bench_file(bench);
    SignalProfile profile = profile_from_csv_file(profile_path);

    CampaignConfig cfg;
    cfg.profiling.rare_threshold = threshold;
    StrategySpec spec;
    spec.name = strategy;
    spec.polarity = polarity;
    spec.budget = budget;
    spec.n_detect = n_detect;
    spec.seed = seed;
    cfg.strategies.push_back(spec);

    auto sets = stage_gentests(golden, profile, cfg);
    if (!sets.count(strategy)) {
        std::cerr << "strategy '" << strategy << "' does not produce a test set\n";
        return kExitConfig;
    }
    if (out.empty())
        write_testset(std::cout, sets.at(strategy));
    else
        write_testset_file(sets.at(strategy), out);
    return 0;
}

int run_detect(const std::string& golden_path, const std::string& suspect_path,
               const std::string& suspect_dir, const std::string& tests_path,
               const std::string& strategy, std::uint64_t iteration_budget, double budget_seconds,
               std::uint64_t seed, const std::string& out_dir) {
    Netlist golden = parse_bench_file(golden_path);
    std::vector<fs::path> suspects;
    if (!suspect_path.empty()) suspects.push_back(suspect_path);
    if (!suspect_dir.empty()) {
        for (const auto& e : fs::directory_iterator(suspect_dir))
            if (e.path().extension() == ".bench") suspects.push_back(e.path());
        std::sort(suspects.begin(), suspects.end());
    }
    if (suspects.empty()) {
        std::cerr << "no suspect netlists given (--suspect or --suspect-dir)\n";
        return kExitConfig;
    }
    if (!out_dir.empty()) fs::create_directories(out_dir);

    TestSet tests;
    if (strategy != "sat") {
        if (tests_path.empty()) {
            std::cerr << "--tests is required unless --strategy sat\n";
            return kExitConfig;
        }
        tests = read_testset_file(tests_path);
    }

    int detected = 0;
    for (const auto& sp : suspects) {
        Netlist suspect = parse_bench_file(sp.string());
        SuspectOracle oracle = make_simulation_oracle(suspect);
        DetectionReport rep;
        if (strategy == "sat") {
            SatDetectOptions opts;
            opts.iteration_budget = iteration_budget;
            opts.time_budget_seconds = budget_seconds;
            opts.seed = seed;
            rep = sat_detect(golden, oracle, opts);
        } else {
            rep = apply_tests(golden, oracle, tests);
        }
        detected += rep.detected ? 1 : 0;
        std::cout << sp.stem().string() << ": " << (rep.detected ? "DETECTED" : "not detected")
                  << " (" << detect_cause_name(rep.cause) << ", " << rep.queries_used
                  << " queries)\n";
        if (!out_dir.empty()) {
            std::ofstream rf(fs::path(out_dir) / (sp.stem().string() + "_report.json"));
            rf << report_to_json(rep);
        }
    }
    std::cout << "detected " << detected << "/" << suspects.size() << "\n";
    return 0;
}

int run_campaign_cmd(const std::string& config_path, const std::string& out_dir, int workers,
                     double budget_seconds) {
    CampaignConfig cfg = config_from_file(config_path);
    if (workers > 0) cfg.workers = workers;
    if (budget_seconds > 0)
        for (auto& s : cfg.strategies)
            if (s.name == "sat") s.time_budget_seconds = budget_seconds;
    try {
        ResultMatrix m = run_campaign(cfg, out_dir);
        std::cout << matrix_to_csv(m, true);
    } catch (const Error& e) {
        throw StageFailure(e.what());
    }
    return 0;
}

int run_report(const std::string& config_path, const std::string& reports_dir,
               const std::string& benchmark_name, const std::string& out) {
    CampaignConfig cfg = config_from_file(config_path);
    ResultMatrix m = aggregate_reports(benchmark_name, cfg, reports_dir);
    if (out.empty()) {
        std::cout << matrix_to_csv(m, true);
    } else {
        std::ofstream f(out, std::ios::binary);
        f << matrix_to_csv(m, true);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gate-level hardware-Trojan workbench"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a benchmark netlist");
    std::string gen_kind = "sbox_network", gen_out;
    int gen_width = 32;
    std::uint64_t gen_seed = 1;
    gen->add_option("--kind", gen_kind, "multiplier | xor_tree | sbox_network");
    gen->add_option("--width", gen_width, "bit width / input count");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--out", gen_out, "output .bench path (default stdout)");

    // profile
    auto* prof = app.add_subcommand("profile", "estimate rare values by random simulation");
    std::string prof_bench, prof_out;
    std::uint64_t prof_samples = 100000, prof_seed = 11;
    prof->add_option("--bench", prof_bench, ".bench netlist")->required();
    prof->add_option("--samples", prof_samples, "sample count");
    prof->add_option("--seed", prof_seed, "stimulus seed");
    prof->add_option("--out", prof_out, "profile CSV path (default stdout)");

    // inject
    auto* inj = app.add_subcommand("inject", "insert a population of Trojan instances");
    std::string inj_bench, inj_profile, inj_kind = "troll", inj_out, inj_sidecar;
    int inj_bits = 8, inj_count = 1, inj_payload = 8;
    std::uint64_t inj_seed = 1, inj_tsamples = 10000;
    double inj_threshold = 0.1;
    inj->add_option("--bench", inj_bench, "golden .bench netlist")->required();
    inj->add_option("--profile", inj_profile, "profile CSV from `profile`")->required();
    inj->add_option("--kind", inj_kind, "troll | rare_node | random_node");
    inj->add_option("--trigger-bits", inj_bits, "cube width (troll) or conjunct count q");
    inj->add_option("--count", inj_count, "instances to create");
    inj->add_option("--seed", inj_seed, "instance seed");
    inj->add_option("--trigger-samples", inj_tsamples, "sample-set size for trigger selection");
    inj->add_option("--threshold", inj_threshold, "rare threshold");
    inj->add_option("--payload-outputs", inj_payload, "payload size (lexicographically-first outputs)");
    inj->add_option("--out", inj_out, "instance output directory")->required();
    inj->add_option("--sidecar-dir", inj_sidecar, "ground-truth directory (must not sit in --out)");

    // gentests
    auto* gt = app.add_subcommand("gentests", "generate a detection test set");
    std::string gt_bench, gt_profile, gt_strategy = "stat", gt_polarity = "rare", gt_out;
    std::uint64_t gt_budget = 10000, gt_n = 1000, gt_seed = 1;
    double gt_threshold = 0.1;
    gt->add_option("--bench", gt_bench, "golden .bench netlist")->required();
    gt->add_option("--profile", gt_profile, "profile CSV")->required();
    gt->add_option("--strategy", gt_strategy, "random | stat | clique | evolved_stat | evolved_clique");
    gt->add_option("--polarity", gt_polarity, "rare | prevalent");
    gt->add_option("--budget", gt_budget, "pattern / clique budget");
    gt->add_option("--n-detect", gt_n, "N-detect target per node");
    gt->add_option("--threshold", gt_threshold, "rare threshold");
    gt->add_option("--seed", gt_seed, "generation seed");
    gt->add_option("--out", gt_out, "test-set file (default stdout)");

    // detect
    auto* det = app.add_subcommand("detect", "run detection against suspects");
    std::string det_golden, det_suspect, det_suspect_dir, det_tests, det_strategy = "tests", det_out;
    std::uint64_t det_iters = 10000, det_seed = 1;
    double det_seconds = 600.0;
    det->add_option("--golden", det_golden, "golden .bench netlist")->required();
    det->add_option("--suspect", det_suspect, "single suspect .bench");
    det->add_option("--suspect-dir", det_suspect_dir, "directory of suspect .bench files");
    det->add_option("--tests", det_tests, "test-set file (from gentests)");
    det->add_option("--strategy", det_strategy, "tests | sat");
    det->add_option("--iteration-budget", det_iters, "sat: max distinguishing inputs");
    det->add_option("--budget-seconds", det_seconds, "sat: wall budget per suspect");
    det->add_option("--seed", det_seed, "sat: solver seed");
    det->add_option("--out", det_out, "report output directory");

    // campaign
    auto* camp = app.add_subcommand("campaign", "run a full campaign from a JSON config");
    std::string camp_config, camp_out = "campaign_out";
    int camp_workers = 0;
    double camp_seconds = 0.0;
    camp->add_option("--config", camp_config, "campaign config JSON")->required();
    camp->add_option("--out", camp_out, "artifact directory");
    camp->add_option("--workers", camp_workers, "worker threads (overrides config)");
    camp->add_option("--budget-seconds", camp_seconds, "override sat wall budget");

    // report
    auto* rep = app.add_subcommand("report", "aggregate per-instance reports into a matrix");
    std::string rep_config, rep_dir, rep_name = "bench", rep_out;
    rep->add_option("--config", rep_config, "campaign config JSON")->required();
    rep->add_option("--reports", rep_dir, "directory of report JSON files")->required();
    rep->add_option("--benchmark-name", rep_name, "benchmark row label");
    rep->add_option("--out", rep_out, "matrix CSV path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return run_gen(gen_kind, gen_width, gen_seed, gen_out);
        if (prof->parsed()) return run_profile(prof_bench, prof_samples, prof_seed, prof_out);
        if (inj->parsed())
            return run_inject(inj_bench, inj_profile, inj_kind, inj_bits, inj_count, inj_seed,
                              inj_tsamples, inj_threshold, inj_payload, inj_out, inj_sidecar);
        if (gt->parsed())
            return run_gentests(gt_bench, gt_profile, gt_strategy, gt_polarity, gt_budget, gt_n,
                                gt_threshold, gt_seed, gt_out);
        if (det->parsed())
            return run_detect(det_golden, det_suspect, det_suspect_dir, det_tests, det_strategy,
                              det_iters, det_seconds, det_seed, det_out);
        if (camp->parsed()) return run_campaign_cmd(camp_config, camp_out, camp_workers, camp_seconds);
        if (rep->parsed()) return run_report(rep_config, rep_dir, rep_name, rep_out);
    } catch (const StageFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitStage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return 0;
}
