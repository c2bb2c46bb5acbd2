// Test-based detection strategies against a black-box suspect oracle plus
// the golden netlist: random sampling, statistical (N-detect) and
// maximal-clique test generation, their prevalent-value variants, and
// SAT-based detection.

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hwt/miter.hpp"
#include "hwt/netlist.hpp"
#include "hwt/rarity.hpp"
#include "hwt/sim.hpp"
#include "hwt/solver.hpp"

namespace hwt {

// Black-box query access to the suspect chip. Detection code never sees
// the suspect netlist or its sidecar; the campaign runner builds these.
class SuspectOracle {
  public:
    using QueryFn = std::function<std::vector<std::uint8_t>(const Pattern&)>;
    // Batched form: lane j of each output word = outputs under patterns[j].
    using BlockFn = std::function<void(const Pattern*, std::size_t, std::vector<std::uint64_t>&)>;

    SuspectOracle(std::size_t in_width, std::size_t out_width, QueryFn query, BlockFn block = nullptr);

    std::size_t input_width() const { return in_width_; }
    std::size_t output_width() const { return out_width_; }

    std::vector<std::uint8_t> query(const Pattern& p);
    void query_block(const Pattern* pats, std::size_t count, std::vector<std::uint64_t>& out_words);

    // Witness confirmation at report construction; not counted or budgeted.
    std::vector<std::uint8_t> verification_query(const Pattern& p) const { return query_(p); }

    std::uint64_t queries_used() const { return counter_; }
    void set_budget(std::uint64_t max_queries) { budget_ = max_queries; }
    std::optional<std::uint64_t> budget() const { return budget_; }
    std::uint64_t remaining() const;

  private:
    std::size_t in_width_, out_width_;
    QueryFn query_;
    BlockFn block_;
    std::uint64_t counter_ = 0;
    std::optional<std::uint64_t> budget_;
};

SuspectOracle make_simulation_oracle(const Netlist& suspect,
                                     std::optional<std::uint64_t> budget = std::nullopt);

enum class Polarity { Rare, Prevalent };
const char* polarity_name(Polarity p);

struct TestSetMeta {
    std::string strategy;
    std::string polarity;  // rare | prevalent | combined | random
    std::uint64_t seed = 0;
    std::uint64_t budget = 0;
    std::uint64_t n_detect = 0;
    bool partial = false;  // clique generation ran out of SAT budget
    std::string note;
};

struct TestSet {
    std::vector<Pattern> patterns;
    TestSetMeta meta;

    // Duplicates are permitted in the list but count once against budgets.
    std::size_t unique_count() const;
};

void write_testset(std::ostream& out, const TestSet& ts);
TestSet read_testset(std::istream& in);
void write_testset_file(const TestSet& ts, const std::string& path);
TestSet read_testset_file(const std::string& path);

enum class DetectCause {
    EarlyExit,        // witness found
    TestsExhausted,   // every pattern applied, no mismatch
    QueryBudget,      // oracle budget hit first
    Unsat,            // SAT detection: no candidate trigger remains
    IterationBudget,  // SAT detection: DI budget hit
    TimeBudget
};
const char* detect_cause_name(DetectCause c);

struct DetectionReport {
    std::string strategy;
    bool detected = false;
    std::optional<Pattern> first_detecting_pattern;
    std::uint64_t queries_used = 0;
    double wall_seconds = 0.0;
    DetectCause cause = DetectCause::TestsExhausted;
    // SAT strategy only:
    std::uint64_t iterations = 0;
    std::vector<Pattern> di_history;
};

std::string report_to_json(const DetectionReport& r);
DetectionReport report_from_json(const std::string& text);

DetectionReport apply_tests(const Netlist& golden, SuspectOracle& suspect, const TestSet& tests);

DetectionReport random_detect(const Netlist& golden, SuspectOracle& suspect, std::uint64_t count,
                              std::uint64_t seed);

struct StatGenOptions {
    std::uint64_t pool_factor = 4;  // pool size = pool_factor * budget
};

// N-detect statistical generation: random pool, one left-to-right
// bit-flip pass per pattern, flips kept on strict demand-coverage gain.
TestSet stat_testgen(const Netlist& golden, const SignalProfile& profile, const RareSet& rare,
                     std::uint64_t n_detect, std::uint64_t budget, Polarity polarity,
                     std::uint64_t seed, const StatGenOptions& opts = {});

struct CliqueGenOptions {
    std::size_t max_targets = 64;          // rarest-first cap on the vertex set
    std::uint64_t per_query_conflicts = 100000;
    double sat_seconds_budget = 0.0;       // 0 = unlimited; partial set on expiry
};

// Maximal-clique sampling over the pairwise co-sensitizability graph;
// one SAT witness per sampled clique becomes a test.
TestSet clique_testgen(const Netlist& golden, const RareSet& rare, std::uint64_t clique_budget,
                       Polarity polarity, std::uint64_t seed, const CliqueGenOptions& opts = {});

// Concatenation, rare-polarity tests first.
TestSet evolved_union(const TestSet& rare_tests, const TestSet& prevalent_tests);

struct SatDetectOptions {
    std::uint64_t iteration_budget = 10000;
    double time_budget_seconds = 600.0;
    std::uint64_t seed = 1;
};

DetectionReport sat_detect(const Netlist& golden, SuspectOracle& suspect,
                           const SatDetectOptions& opts = {});

}  // namespace hwt
