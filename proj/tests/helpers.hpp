// Shared test utilities: random circuit generation and brute-force oracles.
// Oracles here stay independent of the library's fast paths: they use the
// scalar evaluator and plain loops only.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "hwt/netlist.hpp"
#include "hwt/rarity.hpp"
#include "hwt/rng.hpp"
#include "hwt/sim.hpp"

namespace hwt::testing {

// Random DAG over the folding gate kinds (plus NOT); every gate reachable
// nets keep generated names g<N>.
inline Netlist random_netlist(int n_inputs, int n_gates, std::uint64_t seed, int n_outputs = -1) {
    rng::Stream rs(seed, "random_netlist");
    Netlist n;
    n.name = "rand" + std::to_string(seed);
    for (int i = 0; i < n_inputs; ++i) n.inputs.push_back("i" + std::to_string(i));
    std::vector<std::string> nets = n.inputs;
    for (int g = 0; g < n_gates; ++g) {
        const GateKind kinds[] = {GateKind::And, GateKind::Nand, GateKind::Or,  GateKind::Nor,
                                  GateKind::Xor, GateKind::Xnor, GateKind::Not, GateKind::Buf};
        GateKind kind = kinds[rs.next_below(8)];
        std::string out = "g" + std::to_string(g);
        std::vector<std::string> fanins;
        if (kind == GateKind::Not || kind == GateKind::Buf) {
            fanins.push_back(nets[rs.next_below(nets.size())]);
        } else {
            const int arity = 2 + static_cast<int>(rs.next_below(3));  // 2..4
            for (int k = 0; k < arity; ++k) fanins.push_back(nets[rs.next_below(nets.size())]);
        }
        n.gates.push_back({out, kind, std::move(fanins)});
        nets.push_back(out);
    }
    if (n_outputs < 0) n_outputs = std::max(1, n_gates / 4);
    for (int o = 0; o < n_outputs && o < n_gates; ++o)
        n.outputs.push_back("g" + std::to_string(n_gates - 1 - o));
    n.validate();
    return n;
}

// All 2^width patterns in binary counting order (bit i of v -> input i).
inline std::vector<Pattern> all_patterns(std::size_t width) {
    std::vector<Pattern> out;
    out.reserve(1ull << width);
    for (std::uint64_t v = 0; v < (1ull << width); ++v) out.push_back(Pattern::from_uint(v, width));
    return out;
}

// Scalar reference evaluation of one net under one pattern.
inline std::map<std::string, std::uint8_t> slow_eval(const Netlist& n, const Pattern& p) {
    return evaluate(n, p).internals;
}

// Brute-force trigger-selection oracle: scalar evaluate per sample,
// literal min/max scan of the profile.
inline std::pair<Pattern, double> brute_force_trigger(const Netlist& n, const SignalProfile& profile,
                                                      const std::vector<Pattern>& samples) {
    Pattern best;
    double best_p = -1.0;
    for (const auto& s : samples) {
        auto vals = evaluate(n, s).internals;
        double p_tmp = 0.5;
        for (const auto& e : profile.entries) {
            const bool v = vals.at(e.net) != 0;
            if (v == e.rare_value && e.rare_prob < p_tmp) p_tmp = e.rare_prob;
        }
        if (p_tmp > best_p) {
            best_p = p_tmp;
            best = s;
        }
    }
    return {best, best_p};
}

}  // namespace hwt::testing
