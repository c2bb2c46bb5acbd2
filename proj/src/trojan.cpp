#include "hwt/trojan.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "hwt/rng.hpp"

namespace hwt {

using nlohmann::json;

bool TriggerCube::matches(const Netlist& n, const Pattern& p) const {
    for (const auto& lit : literals) {
        std::size_t pos = 0;
        while (pos < n.inputs.size() && n.inputs[pos] != lit.input) ++pos;
        if (pos >= n.inputs.size()) throw Error("cube literal on unknown input " + lit.input);
        if ((p.bits[pos] != 0) != lit.value) return false;
    }
    return true;
}

PayloadSpec default_payload(const Netlist& n) {
    std::vector<std::string> outs = n.outputs;
    std::sort(outs.begin(), outs.end());
    outs.resize(std::min<std::size_t>(8, outs.size()));
    return PayloadSpec{std::move(outs)};
}

const char* trojan_kind_name(TrojanKind k) {
    switch (k) {
        case TrojanKind::Troll: return "troll";
        case TrojanKind::RareNode: return "rare_node";
        case TrojanKind::RandomNode: return "random_node";
    }
    return "?";
}

bool trojan_kind_from_name(const std::string& s, TrojanKind& out) {
    if (s == "troll") out = TrojanKind::Troll;
    else if (s == "rare_node") out = TrojanKind::RareNode;
    else if (s == "random_node") out = TrojanKind::RandomNode;
    else return false;
    return true;
}

TriggerSelection select_trigger(const Netlist& n, const SignalProfile& profile,
                                const std::vector<Pattern>& samples) {
    if (samples.empty()) throw Error("select_trigger: empty sample set");
    Evaluator ev(n);

    // Profiled nets, as (evaluator index, rare value, probability).
    struct Tracked {
        int idx;
        bool rare;
        double p;
    };
    std::vector<Tracked> tracked;
    tracked.reserve(profile.entries.size());
    for (const auto& e : profile.entries)
        tracked.push_back({ev.net_index(e.net), e.rare_value, e.rare_prob});

    Pattern best;
    double best_p = -1.0;
    std::vector<std::uint64_t> words;
    for (std::size_t at = 0; at < samples.size(); at += 64) {
        const std::size_t lanes = std::min<std::size_t>(64, samples.size() - at);
        ev.run_packed(samples.data() + at, lanes, words);
        std::array<double, 64> lane_min;
        lane_min.fill(0.5);
        for (const auto& t : tracked) {
            if (t.p >= 0.5) continue;  // balanced nets never lower the tracker
            const std::uint64_t sensitized = t.rare ? words[t.idx] : ~words[t.idx];
            for (std::size_t j = 0; j < lanes; ++j)
                if ((sensitized >> j) & 1 && t.p < lane_min[j]) lane_min[j] = t.p;
        }
        for (std::size_t j = 0; j < lanes; ++j) {
            if (lane_min[j] > best_p) {
                best_p = lane_min[j];
                best = samples[at + j];
            }
        }
    }
    return {best, best_p};
}

TriggerCube restrict_trigger(const Pattern& full, std::size_t k,
                             const std::vector<std::string>& input_names, std::uint64_t seed) {
    if (k < 1 || k > full.width()) throw Error("restrict_trigger: k out of range");
    if (input_names.size() != full.width()) throw Error("restrict_trigger: name list width mismatch");
    rng::Stream rs(seed, "restrict_trigger");
    std::vector<std::size_t> idx(full.width());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + rs.next_below(idx.size() - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    TriggerCube cube;
    for (std::size_t i : idx) cube.literals.push_back({input_names[i], full.bits[i] != 0});
    return cube;
}

namespace {

void check_prefix_free(const Netlist& n) {
    for (const auto& in : n.inputs)
        if (in.rfind("__t_", 0) == 0) throw Error("insertion: reserved prefix __t_ already taken");
    for (const auto& g : n.gates)
        if (g.output.rfind("__t_", 0) == 0) throw Error("insertion: reserved prefix __t_ already taken");
}

// Balanced AND tree over `leaves`; returns the net carrying the conjunction.
std::string build_and_tree(Netlist& n, std::vector<std::string> leaves, int& counter) {
    if (leaves.empty()) throw Error("empty trigger conjunction");
    while (leaves.size() > 1) {
        std::vector<std::string> next;
        for (std::size_t i = 0; i + 1 < leaves.size(); i += 2) {
            std::string out = "__t_and" + std::to_string(counter++);
            n.gates.push_back({out, GateKind::And, {leaves[i], leaves[i + 1]}});
            next.push_back(out);
        }
        if (leaves.size() % 2) next.push_back(leaves.back());
        leaves = std::move(next);
    }
    return leaves[0];
}

// Redirect `out_name` through an XOR with the trigger: the original driver
// (and every reader) moves to a fresh net, then out_name = XOR(fresh, trig).
// Readers include the trigger tree itself, so node taps observe the
// pre-corruption value.
void attach_payload(Netlist& n, const std::vector<std::string>& flip_outputs,
                    const std::string& trigger_net) {
    std::unordered_map<std::string, std::string> renamed;
    for (const auto& o : flip_outputs) renamed[o] = "__t_pre_" + o;
    for (auto& g : n.gates) {
        if (auto it = renamed.find(g.output); it != renamed.end()) g.output = it->second;
        for (auto& f : g.fanins)
            if (auto it = renamed.find(f); it != renamed.end()) f = it->second;
    }
    for (const auto& [o, pre] : renamed) n.gates.push_back({o, GateKind::Xor, {pre, trigger_net}});
}

void check_payload(const Netlist& n, const PayloadSpec& payload) {
    if (payload.flip_outputs.empty()) throw Error("payload: empty flip list");
    std::set<std::string> outs(n.outputs.begin(), n.outputs.end());
    std::set<std::string> seen;
    for (const auto& o : payload.flip_outputs) {
        if (!outs.count(o)) throw Error("payload: '" + o + "' is not an output");
        if (!seen.insert(o).second) throw Error("payload: duplicate output '" + o + "'");
        if (n.is_input(o))
            throw Error("payload: output '" + o + "' is driven directly by a primary input");
    }
}

}  // namespace

TrojanInstance insert_troll(const Netlist& n, const TriggerCube& trigger, const PayloadSpec& payload) {
    check_prefix_free(n);
    check_payload(n, payload);
    if (trigger.literals.empty()) throw Error("insert_troll: empty trigger cube");
    {
        std::set<std::string> ins(n.inputs.begin(), n.inputs.end());
        std::set<std::string> seen;
        for (const auto& lit : trigger.literals) {
            if (!ins.count(lit.input)) throw Error("trigger literal on unknown input " + lit.input);
            if (!seen.insert(lit.input).second)
                throw Error("trigger cube repeats input " + lit.input);
        }
    }

    TrojanInstance inst;
    inst.kind = TrojanKind::Troll;
    inst.trigger = trigger;
    inst.payload = payload;
    inst.infected = n;
    Netlist& inf = inst.infected;

    int counter = 0;
    std::vector<std::string> leaves;
    for (const auto& lit : trigger.literals) {
        if (lit.value) {
            leaves.push_back(lit.input);
        } else {
            std::string inv = "__t_inv" + std::to_string(counter++);
            inf.gates.push_back({inv, GateKind::Not, {lit.input}});
            leaves.push_back(inv);
        }
    }
    std::string trig;
    if (leaves.size() == 1 && trigger.literals[0].value) {
        trig = "__t_trig";
        inf.gates.push_back({trig, GateKind::Buf, {leaves[0]}});
    } else if (leaves.size() == 1) {
        trig = leaves[0];
    } else {
        trig = build_and_tree(inf, std::move(leaves), counter);
    }
    attach_payload(inf, payload.flip_outputs, trig);
    inf.validate();
    inst.provenance.trigger_bits = static_cast<int>(trigger.width());
    return inst;
}

TrojanInstance insert_node_trojan(const Netlist& n, const SignalProfile& profile, TrojanKind kind,
                                  std::size_t q, const PayloadSpec& payload, std::uint64_t seed,
                                  double rare_threshold) {
    if (kind != TrojanKind::RareNode && kind != TrojanKind::RandomNode)
        throw Error("insert_node_trojan: kind must be rare_node or random_node");
    check_prefix_free(n);
    check_payload(n, payload);
    if (q < 1) throw Error("insert_node_trojan: q must be >= 1");

    rng::Stream rs(seed, kind == TrojanKind::RareNode ? "rare_node" : "random_node");
    std::vector<NodeConjunct> conjuncts;
    if (kind == TrojanKind::RareNode) {
        RareSet rs_set = rare_set(profile, rare_threshold);
        if (rs_set.members.size() < q)
            throw Error("insert_node_trojan: only " + std::to_string(rs_set.members.size()) +
                        " rare nodes below threshold, need " + std::to_string(q));
        std::vector<std::size_t> idx(rs_set.members.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        for (std::size_t i = 0; i < q; ++i) {
            std::size_t j = i + rs.next_below(idx.size() - i);
            std::swap(idx[i], idx[j]);
        }
        for (std::size_t i = 0; i < q; ++i) {
            const auto& m = rs_set.members[idx[i]];
            conjuncts.push_back({m.net, m.rare_value});
        }
    } else {
        if (profile.entries.size() < q)
            throw Error("insert_node_trojan: q exceeds internal net count");
        std::vector<std::size_t> idx(profile.entries.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        for (std::size_t i = 0; i < q; ++i) {
            std::size_t j = i + rs.next_below(idx.size() - i);
            std::swap(idx[i], idx[j]);
        }
        for (std::size_t i = 0; i < q; ++i)
            conjuncts.push_back({profile.entries[idx[i]].net, rs.next_bit()});
    }
    std::sort(conjuncts.begin(), conjuncts.end(),
              [](const NodeConjunct& a, const NodeConjunct& b) { return a.net < b.net; });

    TrojanInstance inst;
    inst.kind = kind;
    inst.conjuncts = conjuncts;
    inst.payload = payload;
    inst.infected = n;
    Netlist& inf = inst.infected;

    int counter = 0;
    std::vector<std::string> leaves;
    for (const auto& c : conjuncts) {
        if (c.value) {
            leaves.push_back(c.net);
        } else {
            std::string inv = "__t_inv" + std::to_string(counter++);
            inf.gates.push_back({inv, GateKind::Not, {c.net}});
            leaves.push_back(inv);
        }
    }
    std::string trig;
    if (leaves.size() == 1) {
        trig = "__t_trig";
        inf.gates.push_back({trig, GateKind::Buf, {leaves[0]}});
    } else {
        trig = build_and_tree(inf, std::move(leaves), counter);
    }
    attach_payload(inf, payload.flip_outputs, trig);
    inf.validate();
    inst.provenance.seed = seed;
    inst.provenance.trigger_bits = static_cast<int>(q);
    return inst;
}

InfectionReport verify_infection(const Netlist& original, const TrojanInstance& inst,
                                 std::optional<std::uint64_t> sample_budget,
                                 std::uint64_t sample_seed) {
    InfectionReport rep;
    const std::size_t width = original.inputs.size();
    if (inst.infected.inputs != original.inputs || inst.infected.outputs != original.outputs) {
        rep.detail = "I/O pin lists differ";
        return rep;
    }

    Evaluator ev_orig(original);
    Evaluator ev_inf(inst.infected);

    // Expected flipped-output mask, in output order.
    std::vector<bool> flip(original.outputs.size(), false);
    for (std::size_t i = 0; i < original.outputs.size(); ++i)
        for (const auto& o : inst.payload.flip_outputs)
            if (original.outputs[i] == o) flip[i] = true;

    // Trigger predicate evaluated on ORIGINAL circuit values.
    std::vector<std::pair<int, bool>> trig_nets;  // (orig evaluator index, required value)
    std::vector<std::pair<std::size_t, bool>> trig_bits;
    if (inst.kind == TrojanKind::Troll) {
        for (const auto& lit : inst.trigger.literals) {
            std::size_t pos = 0;
            while (pos < width && original.inputs[pos] != lit.input) ++pos;
            if (pos >= width) {
                rep.detail = "trigger literal on unknown input";
                return rep;
            }
            trig_bits.push_back({pos, lit.value});
        }
    } else {
        for (const auto& c : inst.conjuncts) trig_nets.push_back({ev_orig.net_index(c.net), c.value});
    }

    const bool exhaustive = !sample_budget.has_value();
    if (exhaustive && width > 20)
        throw Error("verify_infection: exhaustive mode needs <= 20 inputs; pass a sample budget");
    const std::uint64_t total = exhaustive ? (1ull << width) : *sample_budget;
    rep.exhaustive = exhaustive;

    std::vector<std::uint64_t> in_words(width);
    std::vector<std::uint64_t> w_orig, w_inf;
    const auto& out_orig = ev_orig.output_indices();
    const auto& out_inf = ev_inf.output_indices();

    for (std::uint64_t base = 0; base < total; base += 64) {
        const std::size_t lanes = static_cast<std::size_t>(std::min<std::uint64_t>(64, total - base));
        std::fill(in_words.begin(), in_words.end(), 0);
        for (std::size_t j = 0; j < lanes; ++j) {
            if (exhaustive) {
                const std::uint64_t v = base + j;
                for (std::size_t i = 0; i < width; ++i)
                    if ((v >> i) & 1) in_words[i] |= 1ull << j;
            } else {
                Pattern p = random_pattern_at(base + j, width, sample_seed);
                for (std::size_t i = 0; i < width; ++i)
                    if (p.bits[i]) in_words[i] |= 1ull << j;
            }
        }
        ev_orig.run_packed_words(in_words.data(), lanes, w_orig);
        ev_inf.run_packed_words(in_words.data(), lanes, w_inf);

        const std::uint64_t mask = lanes == 64 ? ~0ull : ((1ull << lanes) - 1);
        std::uint64_t fire = mask;
        for (const auto& [pos, val] : trig_bits) fire &= val ? in_words[pos] : ~in_words[pos];
        for (const auto& [idx, val] : trig_nets) fire &= val ? w_orig[idx] : ~w_orig[idx];
        fire &= mask;
        rep.activations += std::popcount(fire);

        std::uint64_t bad = 0;
        for (std::size_t oi = 0; oi < out_orig.size(); ++oi) {
            const std::uint64_t diff = (w_orig[out_orig[oi]] ^ w_inf[out_inf[oi]]) & mask;
            const std::uint64_t expect = flip[oi] ? fire : 0ull;
            bad |= diff ^ expect;
        }
        if (bad) {
            const int lane = std::countr_zero(bad);
            Pattern cx;
            cx.bits.resize(width);
            for (std::size_t i = 0; i < width; ++i) cx.bits[i] = (in_words[i] >> lane) & 1;
            rep.counterexample = cx;
            rep.patterns_checked += lane + 1;
            rep.detail = "behavior differs from the trigger/payload contract";
            return rep;
        }
        rep.patterns_checked += lanes;
    }
    rep.passed = true;
    rep.zero_activation = rep.activations == 0;
    if (rep.zero_activation) rep.detail = "zero activation: trigger never fires on checked patterns";
    return rep;
}

std::string sidecar_to_json(const TrojanInstance& inst) {
    json j;
    j["kind"] = trojan_kind_name(inst.kind);
    if (inst.kind == TrojanKind::Troll) {
        json lits = json::array();
        for (const auto& l : inst.trigger.literals) lits.push_back({{"input", l.input}, {"value", l.value}});
        j["trigger_literals"] = lits;
    } else {
        json cj = json::array();
        for (const auto& c : inst.conjuncts) cj.push_back({{"net", c.net}, {"value", c.value}});
        j["node_conjuncts"] = cj;
    }
    j["payload_outputs"] = inst.payload.flip_outputs;
    j["seed"] = inst.provenance.seed;
    if (inst.provenance.p_max >= 0.0) j["p_max"] = inst.provenance.p_max;
    j["profile_ref"] = inst.provenance.profile_ref;
    j["trigger_bits"] = inst.provenance.trigger_bits;
    return j.dump(2) + "\n";
}

TrojanInstance sidecar_from_json(const std::string& text, const Netlist& infected) {
    json j = json::parse(text);
    TrojanInstance inst;
    inst.infected = infected;
    TrojanKind kind;
    if (!trojan_kind_from_name(j.at("kind").get<std::string>(), kind))
        throw Error("sidecar: unknown kind");
    inst.kind = kind;
    if (kind == TrojanKind::Troll) {
        for (const auto& l : j.at("trigger_literals"))
            inst.trigger.literals.push_back({l.at("input").get<std::string>(), l.at("value").get<bool>()});
    } else {
        for (const auto& c : j.at("node_conjuncts"))
            inst.conjuncts.push_back({c.at("net").get<std::string>(), c.at("value").get<bool>()});
    }
    inst.payload.flip_outputs = j.at("payload_outputs").get<std::vector<std::string>>();
    inst.provenance.seed = j.value("seed", 0ull);
    inst.provenance.p_max = j.value("p_max", -1.0);
    inst.provenance.profile_ref = j.value("profile_ref", "");
    inst.provenance.trigger_bits = j.value("trigger_bits", 0);
    return inst;
}

}  // namespace hwt
