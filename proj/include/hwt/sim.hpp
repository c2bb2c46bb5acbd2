// Netlist evaluation on single and word-packed input patterns, seeded
// random stimulus, and the pattern text format.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hwt/netlist.hpp"

namespace hwt {

// One bit per primary input, positional in Netlist.inputs order.
struct Pattern {
    std::vector<std::uint8_t> bits;

    Pattern() = default;
    explicit Pattern(std::vector<std::uint8_t> b) : bits(std::move(b)) {}

    std::size_t width() const { return bits.size(); }
    bool operator==(const Pattern&) const = default;

    std::string to_string() const;
    static Pattern from_string(const std::string& s);
    // Low bit of `value` -> first input.
    static Pattern from_uint(std::uint64_t value, std::size_t width);
    std::uint64_t to_uint() const;
};

// Compiled evaluator: nets get dense indices (primary inputs first, in
// order), gates are flattened in topological order. Reused across many
// evaluations; the hot paths in profiling and detection all sit on this.
class Evaluator {
  public:
    static constexpr std::size_t kLanes = 64;

    explicit Evaluator(const Netlist& n);

    int input_count() const { return static_cast<int>(input_count_); }
    int net_count() const { return static_cast<int>(names_.size()); }
    int net_index(const std::string& net) const;
    const std::vector<std::string>& net_names() const { return names_; }
    const std::vector<int>& output_indices() const { return output_indices_; }

    // Scalar evaluation; `values` is resized to net_count().
    void run(const Pattern& p, std::vector<std::uint8_t>& values) const;

    // Packed evaluation of up to kLanes patterns; lane j of each word holds
    // the value under patterns[j]; lanes >= count stay zero.
    void run_packed(const Pattern* patterns, std::size_t count,
                    std::vector<std::uint64_t>& words) const;
    // Same, with inputs already packed (one word per primary input).
    void run_packed_words(const std::uint64_t* input_words, std::size_t count,
                          std::vector<std::uint64_t>& words) const;

    std::vector<std::uint8_t> output_bits(const std::vector<std::uint8_t>& values) const;

  private:
    struct Op {
        GateKind kind;
        std::int32_t out;
        std::int32_t fanin_begin;
        std::int32_t fanin_end;
    };
    std::size_t input_count_;
    std::vector<std::string> names_;
    std::map<std::string, int> index_;
    std::vector<Op> ops_;
    std::vector<std::int32_t> fanins_;
    std::vector<int> output_indices_;
};

struct EvalResult {
    std::vector<std::uint8_t> outputs;
    std::map<std::string, std::uint8_t> internals;  // every net, inputs included
};

EvalResult evaluate(const Netlist& n, const Pattern& p);

struct PackedBlock {
    std::size_t lane_count = 0;
    std::vector<std::uint64_t> words;   // evaluator net order
    std::vector<std::string> names;    // parallel to words

    std::uint64_t word(const std::string& net) const;
    bool bit(const std::string& net, std::size_t lane) const;
};

PackedBlock evaluate_packed(const Netlist& n, const std::vector<Pattern>& patterns);

// Deterministic counter-based stimulus; every bit marginally uniform and
// addressable by (seed, pattern index) alone.
std::vector<Pattern> random_patterns(std::size_t count, std::size_t width, std::uint64_t seed);
Pattern random_pattern_at(std::size_t index, std::size_t width, std::uint64_t seed);

// Pattern file format: one pattern per line of '0'/'1', '#' comments.
std::vector<Pattern> read_patterns(std::istream& in);
std::vector<Pattern> read_patterns_file(const std::string& path);
void write_patterns(std::ostream& out, const std::vector<Pattern>& pats);

}  // namespace hwt
