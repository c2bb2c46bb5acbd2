// Combinational gate-level netlists: construction, .bench text I/O,
// topological ordering, constant sweeping and benchmark generation.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hwt/error.hpp"

namespace hwt {

enum class GateKind { And, Nand, Or, Nor, Xor, Xnor, Not, Buf, Const0, Const1 };

const char* gate_kind_name(GateKind k);
bool gate_kind_from_name(const std::string& s, GateKind& out);

struct Gate {
    std::string output;
    GateKind kind;
    std::vector<std::string> fanins;  // n-ary kinds fold left

    bool operator==(const Gate&) const = default;
};

// Directed acyclic gate graph. Every net name is driven by exactly one of:
// a primary input, or one gate's output. Immutable once validated; all
// transformations return new values.
class Netlist {
  public:
    std::string name = "bench";
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::vector<Gate> gates;

    // Checks all structural invariants; throws ParseError (categories
    // DuplicateDriver / UndrivenNet / Cycle) or Error on arity violations.
    void validate() const;

    bool is_input(const std::string& net) const;
    bool has_net(const std::string& net) const;

    bool operator==(const Netlist&) const = default;
};

Netlist parse_bench(std::istream& in);
Netlist parse_bench_string(const std::string& text);
Netlist parse_bench_file(const std::string& path);

std::string emit_bench(const Netlist& n);
void emit_bench_file(const Netlist& n, const std::string& path);

// Gate indices in dependency order; among ready gates the smallest
// declaration index goes first, so the order is deterministic.
std::vector<int> topo_order(const Netlist& n);

// Pin the given nets (primary inputs or gate outputs) to constants and
// simplify to fixpoint. Pinned primary inputs leave the input list;
// gates that no feed no output are deleted.
Netlist constant_sweep(const Netlist& n, const std::map<std::string, bool>& pins);

enum class BenchmarkKind { Multiplier, XorTree, SboxNetwork };

bool benchmark_kind_from_name(const std::string& s, BenchmarkKind& out);
const char* benchmark_kind_name(BenchmarkKind k);

// Deterministic generated benchmarks. Width bounds: multiplier 4..16 bits
// per operand, xor_tree 8..64 inputs, sbox_network 16..64 inputs.
Netlist gen_benchmark(BenchmarkKind kind, int width, std::uint64_t seed);

}  // namespace hwt
