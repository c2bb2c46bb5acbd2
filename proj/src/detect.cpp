#include "hwt/detect.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <memory>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "hwt/rng.hpp"

namespace hwt {

using nlohmann::json;

SuspectOracle::SuspectOracle(std::size_t in_width, std::size_t out_width, QueryFn query, BlockFn block)
    : in_width_(in_width), out_width_(out_width), query_(std::move(query)), block_(std::move(block)) {}

std::uint64_t SuspectOracle::remaining() const {
    if (!budget_) return ~0ull;
    return *budget_ > counter_ ? *budget_ - counter_ : 0;
}

std::vector<std::uint8_t> SuspectOracle::query(const Pattern& p) {
    if (p.width() != in_width_) throw Error("oracle: pattern width mismatch");
    if (budget_ && counter_ >= *budget_) throw Error("oracle: query budget exhausted");
    ++counter_;
    return query_(p);
}

void SuspectOracle::query_block(const Pattern* pats, std::size_t count,
                                std::vector<std::uint64_t>& out_words) {
    if (budget_ && counter_ + count > *budget_) throw Error("oracle: query budget exhausted");
    counter_ += count;
    if (block_) {
        block_(pats, count, out_words);
        return;
    }
    out_words.assign(out_width_, 0);
    for (std::size_t j = 0; j < count; ++j) {
        const auto out = query_(pats[j]);
        for (std::size_t oi = 0; oi < out_width_; ++oi)
            if (out[oi]) out_words[oi] |= 1ull << j;
    }
}

SuspectOracle make_simulation_oracle(const Netlist& suspect, std::optional<std::uint64_t> budget) {
    auto ev = std::make_shared<Evaluator>(suspect);
    const std::size_t out_width = suspect.outputs.size();
    SuspectOracle oracle(
        suspect.inputs.size(), out_width,
        [ev](const Pattern& p) {
            std::vector<std::uint8_t> values;
            ev->run(p, values);
            return ev->output_bits(values);
        },
        [ev, out_width](const Pattern* pats, std::size_t count, std::vector<std::uint64_t>& out) {
            std::vector<std::uint64_t> words;
            ev->run_packed(pats, count, words);
            out.assign(out_width, 0);
            const auto& oidx = ev->output_indices();
            for (std::size_t oi = 0; oi < out_width; ++oi) out[oi] = words[oidx[oi]];
        });
    if (budget) oracle.set_budget(*budget);
    return oracle;
}

const char* polarity_name(Polarity p) { return p == Polarity::Rare ? "rare" : "prevalent"; }

std::size_t TestSet::unique_count() const {
    std::unordered_set<std::string> seen;
    for (const auto& p : patterns) seen.insert(p.to_string());
    return seen.size();
}

void write_testset(std::ostream& out, const TestSet& ts) {
    json meta;
    meta["strategy"] = ts.meta.strategy;
    meta["polarity"] = ts.meta.polarity;
    meta["seed"] = ts.meta.seed;
    meta["budget"] = ts.meta.budget;
    meta["n_detect"] = ts.meta.n_detect;
    meta["partial"] = ts.meta.partial;
    meta["note"] = ts.meta.note;
    out << "# " << meta.dump() << "\n";
    write_patterns(out, ts.patterns);
}

TestSet read_testset(std::istream& in) {
    TestSet ts;
    std::string line;
    std::streampos after_header = in.tellg();
    if (std::getline(in, line)) {
        auto hash = line.find('#');
        auto brace = line.find('{');
        if (hash != std::string::npos && brace != std::string::npos && brace > hash) {
            json meta = json::parse(line.substr(brace));
            ts.meta.strategy = meta.value("strategy", "");
            ts.meta.polarity = meta.value("polarity", "");
            ts.meta.seed = meta.value("seed", 0ull);
            ts.meta.budget = meta.value("budget", 0ull);
            ts.meta.n_detect = meta.value("n_detect", 0ull);
            ts.meta.partial = meta.value("partial", false);
            ts.meta.note = meta.value("note", "");
        } else {
            in.seekg(after_header);
        }
    }
    ts.patterns = read_patterns(in);
    return ts;
}

void write_testset_file(const TestSet& ts, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    write_testset(out, ts);
}

TestSet read_testset_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return read_testset(in);
}

const char* detect_cause_name(DetectCause c) {
    switch (c) {
        case DetectCause::EarlyExit: return "early_exit";
        case DetectCause::TestsExhausted: return "tests_exhausted";
        case DetectCause::QueryBudget: return "query_budget";
        case DetectCause::Unsat: return "unsat";
        case DetectCause::IterationBudget: return "iteration_budget";
        case DetectCause::TimeBudget: return "time_budget";
    }
    return "?";
}

namespace {

DetectCause detect_cause_from_name(const std::string& s) {
    for (DetectCause c : {DetectCause::EarlyExit, DetectCause::TestsExhausted, DetectCause::QueryBudget,
                          DetectCause::Unsat, DetectCause::IterationBudget, DetectCause::TimeBudget})
        if (s == detect_cause_name(c)) return c;
    throw Error("unknown detect cause: " + s);
}

// A detected report must carry a true witness; confirm against both sides.
void confirm_witness(DetectionReport& rep, const Netlist& golden, SuspectOracle& suspect) {
    if (!rep.detected) return;
    if (!rep.first_detecting_pattern) throw Error("report: detected without witness");
    const Pattern& w = *rep.first_detecting_pattern;
    const auto suspect_out = suspect.verification_query(w);
    const auto golden_out = evaluate(golden, w).outputs;
    if (suspect_out == golden_out) throw Error("report: witness does not separate suspect from golden");
}

}  // namespace

std::string report_to_json(const DetectionReport& r) {
    json j;
    j["strategy"] = r.strategy;
    j["detected"] = r.detected;
    if (r.first_detecting_pattern) j["first_detecting_pattern"] = r.first_detecting_pattern->to_string();
    j["queries_used"] = r.queries_used;
    j["wall_seconds"] = r.wall_seconds;
    j["cause"] = detect_cause_name(r.cause);
    j["iterations"] = r.iterations;
    json dis = json::array();
    for (const auto& d : r.di_history) dis.push_back(d.to_string());
    j["di_history"] = dis;
    return j.dump(2) + "\n";
}

DetectionReport report_from_json(const std::string& text) {
    json j = json::parse(text);
    DetectionReport r;
    r.strategy = j.at("strategy").get<std::string>();
    r.detected = j.at("detected").get<bool>();
    if (j.contains("first_detecting_pattern"))
        r.first_detecting_pattern = Pattern::from_string(j["first_detecting_pattern"].get<std::string>());
    r.queries_used = j.at("queries_used").get<std::uint64_t>();
    r.wall_seconds = j.at("wall_seconds").get<double>();
    r.cause = detect_cause_from_name(j.at("cause").get<std::string>());
    r.iterations = j.value("iterations", 0ull);
    if (j.contains("di_history"))
        for (const auto& d : j["di_history"]) r.di_history.push_back(Pattern::from_string(d.get<std::string>()));
    return r;
}

DetectionReport apply_tests(const Netlist& golden, SuspectOracle& suspect, const TestSet& tests) {
    if (golden.inputs.size() != suspect.input_width()) throw Error("apply_tests: width mismatch");
    const auto t0 = std::chrono::steady_clock::now();
    DetectionReport rep;
    rep.strategy = tests.meta.strategy.empty() ? "apply_tests" : tests.meta.strategy;
    rep.cause = DetectCause::TestsExhausted;

    Evaluator gev(golden);
    const auto& oidx = gev.output_indices();
    std::vector<std::uint64_t> gwords, swords;

    std::size_t at = 0;
    while (at < tests.patterns.size()) {
        std::uint64_t allow = suspect.remaining();
        if (allow == 0) {
            rep.cause = DetectCause::QueryBudget;
            break;
        }
        const std::size_t lanes =
            std::min<std::size_t>({std::size_t{64}, tests.patterns.size() - at, static_cast<std::size_t>(allow)});
        suspect.query_block(tests.patterns.data() + at, lanes, swords);
        gev.run_packed(tests.patterns.data() + at, lanes, gwords);

        std::uint64_t diff = 0;
        for (std::size_t oi = 0; oi < oidx.size(); ++oi) diff |= gwords[oidx[oi]] ^ swords[oi];
        if (diff) {
            const int lane = std::countr_zero(diff);
            rep.detected = true;
            rep.first_detecting_pattern = tests.patterns[at + lane];
            rep.queries_used += lane + 1;
            rep.cause = DetectCause::EarlyExit;
            break;
        }
        rep.queries_used += lanes;
        at += lanes;
    }
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    confirm_witness(rep, golden, suspect);
    return rep;
}

DetectionReport random_detect(const Netlist& golden, SuspectOracle& suspect, std::uint64_t count,
                              std::uint64_t seed) {
    TestSet ts;
    ts.meta.strategy = "random";
    ts.meta.polarity = "random";
    ts.meta.seed = seed;
    ts.meta.budget = count;
    ts.patterns = random_patterns(count, golden.inputs.size(), seed);
    return apply_tests(golden, suspect, ts);
}

// ------------------------------------------------------------ stat_testgen

TestSet stat_testgen(const Netlist& golden, const SignalProfile& profile, const RareSet& rare,
                     std::uint64_t n_detect, std::uint64_t budget, Polarity polarity,
                     std::uint64_t seed, const StatGenOptions& opts) {
    if (rare.members.empty()) throw Error("stat_testgen: empty target set");
    (void)profile;
    Evaluator ev(golden);
    const std::size_t width = golden.inputs.size();

    struct Target {
        int idx;
        bool value;  // the value we try to activate
        std::uint64_t demand;
    };
    std::vector<Target> targets;
    for (const auto& m : rare.members) {
        const bool v = polarity == Polarity::Rare ? m.rare_value : !m.rare_value;
        targets.push_back({ev.net_index(m.net), v, n_detect});
    }

    TestSet ts;
    ts.meta.strategy = "stat";
    ts.meta.polarity = polarity_name(polarity);
    ts.meta.seed = seed;
    ts.meta.budget = budget;
    ts.meta.n_detect = n_detect;

    const std::uint64_t pool = opts.pool_factor * budget;
    rng::Stream pool_rng(seed, "stat_pool");
    const std::uint64_t pool_seed = pool_rng.next_u64();

    std::unordered_set<std::string> unique;
    std::vector<std::uint64_t> words;
    std::vector<Pattern> block(64);

    // Demand score of each lane: targets with remaining demand activated.
    auto lane_scores = [&](const Pattern* pats, std::size_t count, std::vector<int>& scores) {
        ev.run_packed(pats, count, words);
        scores.assign(count, 0);
        for (const auto& t : targets) {
            if (t.demand == 0) continue;
            const std::uint64_t hit = t.value ? words[t.idx] : ~words[t.idx];
            for (std::size_t j = 0; j < count; ++j)
                if ((hit >> j) & 1) ++scores[j];
        }
    };

    std::uint64_t open_demand = 0;
    for (const auto& t : targets) open_demand += t.demand;

    for (std::uint64_t pi = 0; pi < pool && open_demand > 0 && unique.size() < budget; ++pi) {
        Pattern cur = random_pattern_at(pi, width, pool_seed);

        // One pass over the bits: accept the first flip that strictly
        // improves demanded coverage, re-basing after each acceptance.
        std::size_t next_bit = 0;
        std::vector<int> scores;
        while (next_bit < width) {
            const std::size_t nflips = std::min<std::size_t>(63, width - next_bit);
            block[0] = cur;
            for (std::size_t k = 0; k < nflips; ++k) {
                block[k + 1] = cur;
                block[k + 1].bits[next_bit + k] ^= 1;
            }
            lane_scores(block.data(), nflips + 1, scores);
            const int base = scores[0];
            std::size_t accepted = width;
            for (std::size_t k = 0; k < nflips; ++k) {
                if (scores[k + 1] > base) {
                    accepted = next_bit + k;
                    break;
                }
            }
            if (accepted == width) {
                next_bit += nflips;
            } else {
                cur.bits[accepted] ^= 1;
                next_bit = accepted + 1;
            }
        }

        // Retain the pattern if it serves any remaining demand.
        std::vector<std::uint64_t> one_words;
        ev.run_packed(&cur, 1, one_words);
        bool contributed = false;
        for (auto& t : targets) {
            if (t.demand == 0) continue;
            const bool active = ((t.value ? one_words[t.idx] : ~one_words[t.idx]) & 1ull) != 0;
            if (active) {
                --t.demand;
                --open_demand;
                contributed = true;
            }
        }
        if (contributed) {
            // duplicates stay in the list (they re-apply the pattern) but
            // count once against the budget
            unique.insert(cur.to_string());
            ts.patterns.push_back(std::move(cur));
        }
    }
    return ts;
}

// ---------------------------------------------------------- clique_testgen

TestSet clique_testgen(const Netlist& golden, const RareSet& rare, std::uint64_t clique_budget,
                       Polarity polarity, std::uint64_t seed, const CliqueGenOptions& opts) {
    if (rare.members.empty()) throw Error("clique_testgen: empty target set");
    const auto t0 = std::chrono::steady_clock::now();
    auto expired = [&] {
        if (opts.sat_seconds_budget <= 0) return false;
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() >
               opts.sat_seconds_budget;
    };

    TestSet ts;
    ts.meta.strategy = "clique";
    ts.meta.polarity = polarity_name(polarity);
    ts.meta.seed = seed;
    ts.meta.budget = clique_budget;

    Cnf cnf = tseitin_encode(golden, "G");
    CdclSolver solver(seed);
    solver.load(cnf);
    const SolveBudget per_query{opts.per_query_conflicts, 0.0};

    struct Vertex {
        std::string net;
        int lit;  // assumption literal activating the target value
        bool alive = true;
    };
    std::vector<Vertex> verts;
    const std::size_t ntargets = std::min<std::size_t>(rare.members.size(), opts.max_targets);
    for (std::size_t i = 0; i < ntargets; ++i) {
        const auto& m = rare.members[i];
        const bool v = polarity == Polarity::Rare ? m.rare_value : !m.rare_value;
        const int var = cnf.var_of("G", m.net);
        verts.push_back({m.net, v ? var : -var});
    }

    rng::Stream rnd(seed, "clique_sample");

    // Vertex satisfiability, then the pairwise co-sensitizability graph.
    for (auto& v : verts) {
        auto r = solver.solve(std::vector<int>{v.lit}, per_query);
        if (r.status == SolveStatus::Budget) {
            ts.meta.partial = true;
            ts.meta.note = "sat budget exceeded during vertex checks";
        }
        v.alive = r.status == SolveStatus::Sat;
    }
    const std::size_t nv = verts.size();
    std::vector<std::vector<bool>> edge(nv, std::vector<bool>(nv, false));
    for (std::size_t i = 0; i < nv && !expired(); ++i) {
        if (!verts[i].alive) continue;
        for (std::size_t j = i + 1; j < nv; ++j) {
            if (!verts[j].alive) continue;
            auto r = solver.solve(std::vector<int>{verts[i].lit, verts[j].lit}, per_query);
            if (r.status == SolveStatus::Budget) ts.meta.partial = true;
            edge[i][j] = edge[j][i] = r.status == SolveStatus::Sat;
        }
    }
    if (expired()) {
        ts.meta.partial = true;
        ts.meta.note = "sat budget exceeded during edge construction";
        return ts;
    }

    std::vector<std::size_t> alive_idx;
    for (std::size_t i = 0; i < nv; ++i)
        if (verts[i].alive) alive_idx.push_back(i);
    if (alive_idx.empty()) return ts;

    std::vector<int> input_vars;
    for (const auto& in : golden.inputs) input_vars.push_back(cnf.var_of("G", in));

    for (std::uint64_t c = 0; c < clique_budget; ++c) {
        if (expired()) {
            ts.meta.partial = true;
            ts.meta.note = "sat budget exceeded during clique sampling";
            break;
        }
        solver.reseed(rnd.next_u64());
        const std::size_t seed_v = alive_idx[rnd.next_below(alive_idx.size())];
        std::vector<std::size_t> cand = alive_idx;
        for (std::size_t i = 0; i + 1 < cand.size(); ++i) {
            std::size_t j = i + rnd.next_below(cand.size() - i);
            std::swap(cand[i], cand[j]);
        }

        std::vector<std::size_t> clique{seed_v};
        std::vector<int> assume{verts[seed_v].lit};
        auto base = solver.solve(assume, per_query);
        if (base.status != SolveStatus::Sat) continue;  // stale alive flag under budget
        std::vector<std::uint8_t> witness = base.model;

        for (std::size_t u : cand) {
            if (u == seed_v) continue;
            bool adjacent = true;
            for (std::size_t m : clique)
                if (!edge[u][m]) {
                    adjacent = false;
                    break;
                }
            if (!adjacent) continue;
            assume.push_back(verts[u].lit);
            auto r = solver.solve(assume, per_query);
            if (r.status == SolveStatus::Sat) {
                clique.push_back(u);
                witness = r.model;
            } else {
                if (r.status == SolveStatus::Budget) ts.meta.partial = true;
                assume.pop_back();
            }
        }

        Pattern p;
        p.bits.reserve(input_vars.size());
        for (int v : input_vars) p.bits.push_back(witness.at(v));
        ts.patterns.push_back(std::move(p));
    }
    return ts;
}

TestSet evolved_union(const TestSet& rare_tests, const TestSet& prevalent_tests) {
    if (!rare_tests.patterns.empty() && !prevalent_tests.patterns.empty() &&
        rare_tests.patterns[0].width() != prevalent_tests.patterns[0].width())
        throw Error("evolved_union: width mismatch");
    TestSet ts;
    ts.meta.strategy = "evolved_" + rare_tests.meta.strategy;
    ts.meta.polarity = "combined";
    ts.meta.seed = rare_tests.meta.seed;
    ts.meta.budget = rare_tests.meta.budget + prevalent_tests.meta.budget;
    ts.meta.note = "rare:" + std::to_string(rare_tests.patterns.size()) +
                   " prevalent:" + std::to_string(prevalent_tests.patterns.size());
    ts.patterns = rare_tests.patterns;
    ts.patterns.insert(ts.patterns.end(), prevalent_tests.patterns.begin(),
                       prevalent_tests.patterns.end());
    return ts;
}

// -------------------------------------------------------------- sat_detect

DetectionReport sat_detect(const Netlist& golden, SuspectOracle& suspect,
                           const SatDetectOptions& opts) {
    if (golden.inputs.size() != suspect.input_width()) throw Error("sat_detect: width mismatch");
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    DetectionReport rep;
    rep.strategy = "sat";
    rep.cause = DetectCause::IterationBudget;

    AuxCircuit aux = build_aux(golden);
    DetectionMiter miter(aux);
    CdclSolver solver(opts.seed);
    solver.load(miter.cnf());
    std::size_t synced = miter.cnf().clauses().size();
    Evaluator gev(golden);
    std::vector<std::uint8_t> values;

    while (true) {
        if (rep.iterations >= opts.iteration_budget) {
            rep.cause = DetectCause::IterationBudget;
            break;
        }
        double remain = 0.0;
        if (opts.time_budget_seconds > 0) {
            remain = opts.time_budget_seconds - elapsed();
            if (remain <= 0) {
                rep.cause = DetectCause::TimeBudget;
                break;
            }
        }
        auto res = solver.solve({}, SolveBudget{0, remain});
        if (res.status == SolveStatus::Budget) {
            rep.cause = DetectCause::TimeBudget;
            break;
        }
        if (res.status == SolveStatus::Unsat) {
            rep.cause = DetectCause::Unsat;
            break;
        }
        if (!miter.model_invariant_holds(res.model))
            throw Error("sat_detect: miter model violates the comparator invariant");

        const Pattern di = miter.extract_di(res.model);
        ++rep.iterations;
        rep.di_history.push_back(di);

        if (suspect.remaining() == 0) {
            rep.cause = DetectCause::QueryBudget;
            break;
        }
        const auto observed = suspect.query(di);
        ++rep.queries_used;
        gev.run(di, values);
        const auto golden_out = gev.output_bits(values);
        if (observed != golden_out) {
            rep.detected = true;
            rep.first_detecting_pattern = di;
            rep.cause = DetectCause::EarlyExit;
            break;
        }
        miter.add_io_constraint(di, observed);
        solver.ensure_vars(miter.cnf().num_vars());
        const auto& clauses = miter.cnf().clauses();
        for (; synced < clauses.size(); ++synced) solver.add_clause(clauses[synced]);
    }
    rep.wall_seconds = elapsed();
    confirm_witness(rep, golden, suspect);
    return rep;
}

}  // namespace hwt
