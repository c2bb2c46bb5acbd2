#include "hwt/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "hwt/rng.hpp"

namespace hwt {

namespace fs = std::filesystem;
using nlohmann::json;

std::string InstanceGroup::label() const {
    if (kind == TrojanKind::Troll) return "troll_" + std::to_string(trigger_bits);
    return trojan_kind_name(kind);
}

// ------------------------------------------------------------------ config

namespace {

json strategy_to_json(const StrategySpec& s) {
    json j;
    j["name"] = s.name;
    j["polarity"] = s.polarity;
    j["budget"] = s.budget;
    j["n_detect"] = s.n_detect;
    j["pool_factor"] = s.pool_factor;
    j["max_targets"] = s.max_targets;
    j["iteration_budget"] = s.iteration_budget;
    j["time_budget_seconds"] = s.time_budget_seconds;
    j["seed"] = s.seed;
    return j;
}

StrategySpec strategy_from_json(const json& j) {
    StrategySpec s;
    s.name = j.at("name").get<std::string>();
    s.polarity = j.value("polarity", "rare");
    s.budget = j.value("budget", 10000ull);
    s.n_detect = j.value("n_detect", 1000ull);
    s.pool_factor = j.value("pool_factor", 4ull);
    s.max_targets = j.value("max_targets", std::size_t{64});
    s.iteration_budget = j.value("iteration_budget", 10000ull);
    s.time_budget_seconds = j.value("time_budget_seconds", 600.0);
    s.seed = j.value("seed", 1ull);
    return s;
}

}  // namespace

std::string config_to_json_text(const CampaignConfig& c) {
    json j;
    j["version"] = c.version;
    json b;
    if (!c.benchmark.path.empty()) {
        b["path"] = c.benchmark.path;
    } else {
        b["kind"] = benchmark_kind_name(c.benchmark.kind);
        b["width"] = c.benchmark.width;
        b["seed"] = c.benchmark.seed;
    }
    j["benchmark"] = b;
    j["profiling"] = {{"samples", c.profiling.samples},
                      {"seed", c.profiling.seed},
                      {"rare_threshold", c.profiling.rare_threshold}};
    j["trigger_samples"] = c.trigger_samples;
    j["payload_outputs"] = c.payload_outputs;
    json gi = json::array();
    for (const auto& g : c.instances)
        gi.push_back({{"kind", trojan_kind_name(g.kind)},
                      {"trigger_bits", g.trigger_bits},
                      {"count", g.count},
                      {"seed", g.seed}});
    j["instances"] = gi;
    json st = json::array();
    for (const auto& s : c.strategies) st.push_back(strategy_to_json(s));
    j["strategies"] = st;
    j["workers"] = c.workers;
    return j.dump(2) + "\n";
}

CampaignConfig config_from_json_text(const std::string& text) {
    json j = json::parse(text);
    CampaignConfig c;
    c.version = j.value("version", 1);
    if (c.version != 1) throw Error("config: unsupported version " + std::to_string(c.version));
    const json& b = j.at("benchmark");
    if (b.contains("path")) {
        c.benchmark.path = b["path"].get<std::string>();
    } else {
        BenchmarkKind kind;
        if (!benchmark_kind_from_name(b.at("kind").get<std::string>(), kind))
            throw Error("config: unknown benchmark kind");
        c.benchmark.kind = kind;
        c.benchmark.width = b.at("width").get<int>();
        c.benchmark.seed = b.value("seed", 1ull);
    }
    if (j.contains("profiling")) {
        const json& p = j["profiling"];
        c.profiling.samples = p.value("samples", 100000ull);
        c.profiling.seed = p.value("seed", 11ull);
        c.profiling.rare_threshold = p.value("rare_threshold", 0.1);
    }
    c.trigger_samples = j.value("trigger_samples", 10000ull);
    c.payload_outputs = j.value("payload_outputs", 8);
    for (const auto& g : j.value("instances", json::array())) {
        InstanceGroup ig;
        TrojanKind kind;
        if (!trojan_kind_from_name(g.at("kind").get<std::string>(), kind))
            throw Error("config: unknown trojan kind");
        ig.kind = kind;
        ig.trigger_bits = g.value("trigger_bits", kind == TrojanKind::Troll ? 8 : 4);
        ig.count = g.at("count").get<int>();
        if (ig.count < 1) throw Error("config: instance count must be >= 1");
        ig.seed = g.value("seed", 1ull);
        c.instances.push_back(ig);
    }
    for (const auto& s : j.value("strategies", json::array()))
        c.strategies.push_back(strategy_from_json(s));
    c.workers = j.value("workers", 1);
    if (c.workers < 1) throw Error("config: workers must be >= 1");
    return c;
}

CampaignConfig config_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    CampaignConfig c = config_from_json_text(ss.str());
    if (!c.benchmark.path.empty() && !fs::exists(c.benchmark.path))
        throw Error("config: benchmark path does not exist: " + c.benchmark.path);
    return c;
}

std::string config_hash(const CampaignConfig& c) {
    const std::uint64_t h = rng::fnv1a64(config_to_json_text(c));
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

// ------------------------------------------------------------------ matrix

const CellStats& ResultMatrix::at(const std::string& strategy, const std::string& group) const {
    auto it = cells.find({strategy, group});
    if (it == cells.end()) throw Error("matrix: no cell (" + strategy + ", " + group + ")");
    return it->second;
}

std::string matrix_to_csv(const ResultMatrix& m, bool include_wall) {
    std::ostringstream out;
    out << "benchmark,strategy";
    for (const auto& g : m.groups) {
        out << "," << g << "_pct," << g << "_detected," << g << "_total," << g << "_mean_queries,"
            << g << "_causes";
        if (include_wall) out << "," << g << "_wall_ms";
    }
    out << "\n";
    out.setf(std::ios::fixed);
    for (const auto& s : m.strategies) {
        out << m.benchmark << "," << s;
        for (const auto& g : m.groups) {
            const CellStats& c = m.at(s, g);
            out.precision(1);
            out << "," << c.percent();
            out << "," << c.detected << "," << c.total;
            out.precision(1);
            out << "," << c.mean_queries_to_detect;
            out << ",early:" << c.cause_early_exit << ";unsat:" << c.cause_unsat
                << ";budget:" << c.cause_budget;
            if (include_wall) {
                out.precision(2);
                out << "," << c.mean_wall_seconds * 1000.0;
            }
        }
        out << "\n";
    }
    return out.str();
}

std::string matrix_to_json_text(const ResultMatrix& m) {
    json j;
    j["benchmark"] = m.benchmark;
    j["strategies"] = m.strategies;
    j["groups"] = m.groups;
    json cells = json::object();
    for (const auto& [key, c] : m.cells) {
        cells[key.first + "/" + key.second] = {
            {"total", c.total},
            {"detected", c.detected},
            {"percent", c.percent()},
            {"mean_queries_to_detect", c.mean_queries_to_detect},
            {"mean_wall_seconds", c.mean_wall_seconds},
            {"cause_early_exit", c.cause_early_exit},
            {"cause_unsat", c.cause_unsat},
            {"cause_budget", c.cause_budget},
        };
    }
    j["cells"] = cells;
    return j.dump(2) + "\n";
}

// ------------------------------------------------------------------ stages

Netlist stage_generate(const CampaignConfig& config) {
    if (!config.benchmark.path.empty()) return parse_bench_file(config.benchmark.path);
    return gen_benchmark(config.benchmark.kind, config.benchmark.width, config.benchmark.seed);
}

SignalProfile stage_profile(const Netlist& golden, const ProfilingSpec& spec) {
    return profile_signals(golden, spec.samples, spec.seed);
}

std::vector<InstanceRecord> stage_inject(const Netlist& golden, const SignalProfile& profile,
                                         const CampaignConfig& config) {
    std::vector<std::string> outs = golden.outputs;
    std::sort(outs.begin(), outs.end());
    outs.resize(std::min<std::size_t>(std::max(1, config.payload_outputs), outs.size()));
    const PayloadSpec payload{outs};

    // One trigger-selection run per campaign; instances take random cube
    // subsets of the selected full-width pattern.
    std::optional<TriggerSelection> selection;
    auto ensure_selection = [&] {
        if (selection) return;
        const std::uint64_t s_seed = rng::sub_seed(config.profiling.seed, "trigger_samples");
        const auto samples = random_patterns(config.trigger_samples, golden.inputs.size(), s_seed);
        selection = select_trigger(golden, profile, samples);
    };

    std::vector<InstanceRecord> records;
    for (const auto& group : config.instances) {
        for (int i = 0; i < group.count; ++i) {
            const std::uint64_t inst_seed = rng::at(group.seed, static_cast<std::uint64_t>(i));
            InstanceRecord rec;
            rec.group = group.label();
            rec.id = rec.group + "_i" + std::to_string(i);
            try {
                if (group.kind == TrojanKind::Troll) {
                    ensure_selection();
                    const TriggerCube cube = restrict_trigger(
                        selection->pattern, group.trigger_bits, golden.inputs, inst_seed);
                    rec.instance = insert_troll(golden, cube, payload);
                    rec.instance.provenance.p_max = selection->p_max;
                } else {
                    rec.instance = insert_node_trojan(golden, profile, group.kind, group.trigger_bits,
                                                      payload, inst_seed,
                                                      config.profiling.rare_threshold);
                }
            } catch (const Error& e) {
                throw Error("stage inject, instance " + rec.id + ": " + e.what());
            }
            rec.instance.provenance.seed = inst_seed;
            rec.instance.provenance.profile_ref = "profile.csv";
            records.push_back(std::move(rec));
        }
    }
    return records;
}

namespace {

std::uint64_t derived(std::uint64_t seed, const std::string& label) {
    return rng::sub_seed(seed, label);
}

}  // namespace

std::map<std::string, TestSet> stage_gentests(const Netlist& golden, const SignalProfile& profile,
                                              const CampaignConfig& config) {
    std::map<std::string, TestSet> sets;
    const RareSet rare = rare_set(profile, config.profiling.rare_threshold);
    for (const auto& s : config.strategies) {
        try {
            if (s.name == "random") {
                TestSet ts;
                ts.meta.strategy = "random";
                ts.meta.polarity = "random";
                ts.meta.seed = s.seed;
                ts.meta.budget = s.budget;
                ts.patterns = random_patterns(s.budget, golden.inputs.size(), s.seed);
                sets[s.name] = std::move(ts);
            } else if (s.name == "stat" || s.name == "clique") {
                const Polarity pol = s.polarity == "prevalent" ? Polarity::Prevalent : Polarity::Rare;
                if (s.name == "stat") {
                    sets[s.name] = stat_testgen(golden, profile, rare, s.n_detect, s.budget, pol,
                                                s.seed, {s.pool_factor});
                } else {
                    sets[s.name] =
                        clique_testgen(golden, rare, s.budget, pol, s.seed, {s.max_targets});
                }
            } else if (s.name == "evolved_stat") {
                auto r = stat_testgen(golden, profile, rare, s.n_detect, s.budget / 2, Polarity::Rare,
                                      derived(s.seed, "rare"), {s.pool_factor});
                auto p = stat_testgen(golden, profile, rare, s.n_detect, s.budget - s.budget / 2,
                                      Polarity::Prevalent, derived(s.seed, "prevalent"),
                                      {s.pool_factor});
                sets[s.name] = evolved_union(r, p);
            } else if (s.name == "evolved_clique") {
                auto r = clique_testgen(golden, rare, s.budget / 2, Polarity::Rare,
                                        derived(s.seed, "rare"), {s.max_targets});
                auto p = clique_testgen(golden, rare, s.budget - s.budget / 2, Polarity::Prevalent,
                                        derived(s.seed, "prevalent"), {s.max_targets});
                sets[s.name] = evolved_union(r, p);
            } else if (s.name == "sat") {
                // no pre-generated tests
            } else {
                throw Error("unknown strategy '" + s.name + "'");
            }
        } catch (const Error& e) {
            throw Error("stage gentests, strategy " + s.name + ": " + e.what());
        }
    }
    return sets;
}

std::vector<DetectOutcome> stage_detect(const Netlist& golden,
                                        const std::vector<InstanceRecord>& instances,
                                        const std::map<std::string, TestSet>& testsets,
                                        const CampaignConfig& config) {
    struct Task {
        const InstanceRecord* inst;
        const StrategySpec* strategy;
    };
    std::vector<Task> tasks;
    for (const auto& s : config.strategies)
        for (const auto& inst : instances) tasks.push_back({&inst, &s});

    std::vector<DetectOutcome> outcomes(tasks.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mu;

    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size() || failed.load()) return;
            const Task& t = tasks[i];
            DetectOutcome& out = outcomes[i];
            out.instance_id = t.inst->id;
            out.group = t.inst->group;
            out.strategy = t.strategy->name;
            try {
                SuspectOracle oracle = make_simulation_oracle(t.inst->instance.infected);
                if (t.strategy->name == "sat") {
                    SatDetectOptions opts;
                    opts.iteration_budget = t.strategy->iteration_budget;
                    opts.time_budget_seconds = t.strategy->time_budget_seconds;
                    opts.seed = derived(t.strategy->seed, t.inst->id);
                    out.report = sat_detect(golden, oracle, opts);
                } else {
                    out.report = apply_tests(golden, oracle, testsets.at(t.strategy->name));
                    out.report.strategy = t.strategy->name;
                }
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lk(failure_mu);
                failure = "stage detect, instance " + t.inst->id + ", strategy " + t.strategy->name +
                          ": " + e.what();
                failed.store(true);
                return;
            }
        }
    };

    const int nworkers = std::max(1, config.workers);
    std::vector<std::thread> pool;
    for (int w = 1; w < nworkers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failed.load()) throw Error(failure);
    return outcomes;
}

ResultMatrix stage_report(const std::string& benchmark_name, const CampaignConfig& config,
                          const std::vector<DetectOutcome>& outcomes) {
    ResultMatrix m;
    m.benchmark = benchmark_name;
    for (const auto& s : config.strategies)
        if (std::find(m.strategies.begin(), m.strategies.end(), s.name) == m.strategies.end())
            m.strategies.push_back(s.name);
    for (const auto& g : config.instances)
        if (std::find(m.groups.begin(), m.groups.end(), g.label()) == m.groups.end())
            m.groups.push_back(g.label());

    struct Acc {
        CellStats stats;
        double query_sum = 0.0;
        double wall_sum = 0.0;
    };
    std::map<std::pair<std::string, std::string>, Acc> acc;
    for (const auto& s : m.strategies)
        for (const auto& g : m.groups) acc[{s, g}];

    for (const auto& o : outcomes) {
        Acc& a = acc[{o.strategy, o.group}];
        ++a.stats.total;
        a.wall_sum += o.report.wall_seconds;
        if (o.report.detected) {
            ++a.stats.detected;
            a.query_sum += static_cast<double>(o.report.queries_used);
        }
        switch (o.report.cause) {
            case DetectCause::EarlyExit: ++a.stats.cause_early_exit; break;
            case DetectCause::Unsat: ++a.stats.cause_unsat; break;
            case DetectCause::QueryBudget:
            case DetectCause::IterationBudget:
            case DetectCause::TimeBudget: ++a.stats.cause_budget; break;
            case DetectCause::TestsExhausted: break;
        }
    }
    for (auto& [key, a] : acc) {
        if (a.stats.detected > 0) a.stats.mean_queries_to_detect = a.query_sum / a.stats.detected;
        if (a.stats.total > 0) a.stats.mean_wall_seconds = a.wall_sum / a.stats.total;
        m.cells[key] = a.stats;
    }
    return m;
}

// ---------------------------------------------------------------- pipeline

ResultMatrix run_campaign(const CampaignConfig& config, const std::string& out_dir) {
    const bool write = !out_dir.empty();
    if (write) {
        fs::create_directories(fs::path(out_dir) / "instances");
        fs::create_directories(fs::path(out_dir) / "sidecars");
        fs::create_directories(fs::path(out_dir) / "tests");
        fs::create_directories(fs::path(out_dir) / "reports");
    }

    Netlist golden;
    try {
        golden = stage_generate(config);
    } catch (const Error& e) {
        throw Error(std::string("stage generate: ") + e.what());
    }
    if (write) emit_bench_file(golden, (fs::path(out_dir) / "benchmark.bench").string());

    SignalProfile profile = stage_profile(golden, config.profiling);
    if (write) profile_to_csv_file(profile, (fs::path(out_dir) / "profile.csv").string());

    std::vector<InstanceRecord> instances = stage_inject(golden, profile, config);
    if (write) {
        for (const auto& rec : instances) {
            emit_bench_file(rec.instance.infected,
                            (fs::path(out_dir) / "instances" / (rec.id + ".bench")).string());
            std::ofstream side(fs::path(out_dir) / "sidecars" / (rec.id + ".json"));
            side << sidecar_to_json(rec.instance);
        }
    }

    std::map<std::string, TestSet> testsets = stage_gentests(golden, profile, config);
    if (write) {
        for (const auto& [name, ts] : testsets)
            write_testset_file(ts, (fs::path(out_dir) / "tests" / (name + ".tests")).string());
    }

    std::vector<DetectOutcome> outcomes = stage_detect(golden, instances, testsets, config);
    if (write) {
        for (const auto& o : outcomes) {
            std::ofstream rf(fs::path(out_dir) / "reports" /
                             (o.instance_id + "_" + o.strategy + ".json"));
            json j = json::parse(report_to_json(o.report));
            j["instance_id"] = o.instance_id;
            j["group"] = o.group;
            rf << j.dump(2) << "\n";
        }
    }

    ResultMatrix matrix = stage_report(golden.name, config, outcomes);
    if (write) {
        std::ofstream mc(fs::path(out_dir) / "matrix.csv", std::ios::binary);
        mc << matrix_to_csv(matrix, true);
        std::ofstream mj(fs::path(out_dir) / "matrix.json", std::ios::binary);
        mj << matrix_to_json_text(matrix);
        json manifest;
        manifest["tool_version"] = kToolVersion;
        manifest["config_hash"] = config_hash(config);
        manifest["config"] = json::parse(config_to_json_text(config));
        manifest["benchmark_name"] = golden.name;
        std::ofstream mf(fs::path(out_dir) / "manifest.json", std::ios::binary);
        mf << manifest.dump(2) << "\n";
    }
    return matrix;
}

ResultMatrix aggregate_reports(const std::string& benchmark_name, const CampaignConfig& config,
                               const std::string& reports_dir) {
    std::vector<DetectOutcome> outcomes;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(reports_dir))
        if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        std::ifstream in(f);
        std::stringstream ss;
        ss << in.rdbuf();
        json j = json::parse(ss.str());
        DetectOutcome o;
        o.report = report_from_json(ss.str());
        o.instance_id = j.value("instance_id", "");
        o.group = j.value("group", "");
        o.strategy = o.report.strategy;
        outcomes.push_back(std::move(o));
    }
    return stage_report(benchmark_name, config, outcomes);
}

}  // namespace hwt
