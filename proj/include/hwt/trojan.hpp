// Trigger selection, trigger restriction, and Trojan insertion with
// ground-truth sidecars.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hwt/netlist.hpp"
#include "hwt/rarity.hpp"
#include "hwt/sim.hpp"

namespace hwt {

struct TriggerLiteral {
    std::string input;
    bool value;
    bool operator==(const TriggerLiteral&) const = default;
};

// Partial assignment over primary inputs; the Trojan fires exactly on
// inputs consistent with it.
struct TriggerCube {
    std::vector<TriggerLiteral> literals;

    std::size_t width() const { return literals.size(); }
    bool matches(const Netlist& n, const Pattern& p) const;
    bool operator==(const TriggerCube&) const = default;
};

struct PayloadSpec {
    std::vector<std::string> flip_outputs;
    bool operator==(const PayloadSpec&) const = default;
};

// The lexicographically-first min(8, output count) outputs; fixed per
// benchmark so every instance shares the payload.
PayloadSpec default_payload(const Netlist& n);

enum class TrojanKind { Troll, RareNode, RandomNode };
const char* trojan_kind_name(TrojanKind k);
bool trojan_kind_from_name(const std::string& s, TrojanKind& out);

struct NodeConjunct {
    std::string net;
    bool value;
    bool operator==(const NodeConjunct&) const = default;
};

struct TrojanProvenance {
    std::uint64_t seed = 0;
    double p_max = -1.0;  // troll only
    std::string profile_ref;
    int trigger_bits = 0;  // troll: cube width; node kinds: q
};

// Infected netlist plus ground truth. Detectors never see this type; the
// campaign runner wraps `infected` in an opaque oracle.
struct TrojanInstance {
    Netlist infected;
    TrojanKind kind = TrojanKind::Troll;
    TriggerCube trigger;                  // troll
    std::vector<NodeConjunct> conjuncts;  // rare_node / random_node
    PayloadSpec payload;
    TrojanProvenance provenance;
};

// Algorithm: scan the sample set, score each sample by the minimum rare
// probability it sensitizes (0.5 if none), keep the strict max.
struct TriggerSelection {
    Pattern pattern;
    double p_max;
};

TriggerSelection select_trigger(const Netlist& n, const SignalProfile& profile,
                                const std::vector<Pattern>& samples);

// k distinct positions chosen uniformly without replacement (seeded);
// literal values copied from `full`. Literals ordered by input position.
TriggerCube restrict_trigger(const Pattern& full, std::size_t k,
                             const std::vector<std::string>& input_names, std::uint64_t seed);

TrojanInstance insert_troll(const Netlist& n, const TriggerCube& trigger, const PayloadSpec& payload);

TrojanInstance insert_node_trojan(const Netlist& n, const SignalProfile& profile, TrojanKind kind,
                                  std::size_t q, const PayloadSpec& payload, std::uint64_t seed,
                                  double rare_threshold = 0.1);

struct InfectionReport {
    bool passed = false;
    bool exhaustive = false;
    std::uint64_t patterns_checked = 0;
    std::uint64_t activations = 0;
    bool zero_activation = false;
    std::optional<Pattern> counterexample;
    std::string detail;
};

// Exhaustive when the original has <= 20 inputs; otherwise a sample budget
// must be supplied. This is the ground-truth oracle everything else leans on.
InfectionReport verify_infection(const Netlist& original, const TrojanInstance& inst,
                                 std::optional<std::uint64_t> sample_budget = std::nullopt,
                                 std::uint64_t sample_seed = 1);

// Sidecar JSON (ground truth beside the infected netlist; never read by
// detection code).
std::string sidecar_to_json(const TrojanInstance& inst);
TrojanInstance sidecar_from_json(const std::string& text, const Netlist& infected);

}  // namespace hwt
