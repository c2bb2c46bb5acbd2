#include "hwt/sim.hpp"

#include <fstream>
#include <sstream>

#include "hwt/rng.hpp"

namespace hwt {

std::string Pattern::to_string() const {
    std::string s(bits.size(), '0');
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) s[i] = '1';
    return s;
}

Pattern Pattern::from_string(const std::string& s) {
    Pattern p;
    p.bits.reserve(s.size());
    for (char c : s) {
        if (c == '0' || c == '1')
            p.bits.push_back(c == '1');
        else
            throw Error("pattern: invalid character '" + std::string(1, c) + "'");
    }
    return p;
}

Pattern Pattern::from_uint(std::uint64_t value, std::size_t width) {
    Pattern p;
    p.bits.resize(width);
    for (std::size_t i = 0; i < width; ++i) p.bits[i] = (value >> i) & 1;
    return p;
}

std::uint64_t Pattern::to_uint() const {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < bits.size() && i < 64; ++i)
        if (bits[i]) v |= 1ull << i;
    return v;
}

Evaluator::Evaluator(const Netlist& n) {
    input_count_ = n.inputs.size();
    names_ = n.inputs;
    for (std::size_t i = 0; i < n.inputs.size(); ++i) index_[n.inputs[i]] = static_cast<int>(i);

    const std::vector<int> order = topo_order(n);
    names_.reserve(n.inputs.size() + n.gates.size());
    for (int gi : order) {
        index_[n.gates[gi].output] = static_cast<int>(names_.size());
        names_.push_back(n.gates[gi].output);
    }
    ops_.reserve(order.size());
    for (int gi : order) {
        const Gate& g = n.gates[gi];
        Op op;
        op.kind = g.kind;
        op.out = index_.at(g.output);
        op.fanin_begin = static_cast<std::int32_t>(fanins_.size());
        for (const auto& f : g.fanins) fanins_.push_back(index_.at(f));
        op.fanin_end = static_cast<std::int32_t>(fanins_.size());
        ops_.push_back(op);
    }
    for (const auto& o : n.outputs) output_indices_.push_back(index_.at(o));
}

int Evaluator::net_index(const std::string& net) const {
    auto it = index_.find(net);
    if (it == index_.end()) throw Error("unknown net: " + net);
    return it->second;
}

void Evaluator::run(const Pattern& p, std::vector<std::uint8_t>& values) const {
    if (p.width() != input_count_)
        throw Error("pattern width " + std::to_string(p.width()) + " != input count " +
                    std::to_string(input_count_));
    values.assign(names_.size(), 0);
    for (std::size_t i = 0; i < input_count_; ++i) values[i] = p.bits[i] ? 1 : 0;
    for (const Op& op : ops_) {
        std::uint8_t acc;
        switch (op.kind) {
            case GateKind::Const0: acc = 0; break;
            case GateKind::Const1: acc = 1; break;
            case GateKind::Buf: acc = values[fanins_[op.fanin_begin]]; break;
            case GateKind::Not: acc = values[fanins_[op.fanin_begin]] ^ 1; break;
            default: {
                acc = values[fanins_[op.fanin_begin]];
                for (std::int32_t k = op.fanin_begin + 1; k < op.fanin_end; ++k) {
                    const std::uint8_t v = values[fanins_[k]];
                    switch (op.kind) {
                        case GateKind::And: acc = acc & v; break;
                        case GateKind::Nand: acc = (acc & v) ^ 1; break;
                        case GateKind::Or: acc = acc | v; break;
                        case GateKind::Nor: acc = (acc | v) ^ 1; break;
                        case GateKind::Xor: acc = acc ^ v; break;
                        case GateKind::Xnor: acc = (acc ^ v) ^ 1; break;
                        default: break;
                    }
                }
            }
        }
        values[op.out] = acc;
    }
}

void Evaluator::run_packed_words(const std::uint64_t* input_words, std::size_t count,
                                 std::vector<std::uint64_t>& words) const {
    if (count > kLanes) throw Error("run_packed: more than 64 lanes");
    const std::uint64_t mask = count == kLanes ? ~0ull : ((1ull << count) - 1);
    words.assign(names_.size(), 0);
    for (std::size_t i = 0; i < input_count_; ++i) words[i] = input_words[i] & mask;
    for (const Op& op : ops_) {
        std::uint64_t acc;
        switch (op.kind) {
            case GateKind::Const0: acc = 0; break;
            case GateKind::Const1: acc = ~0ull; break;
            case GateKind::Buf: acc = words[fanins_[op.fanin_begin]]; break;
            case GateKind::Not: acc = ~words[fanins_[op.fanin_begin]]; break;
            default: {
                acc = words[fanins_[op.fanin_begin]];
                for (std::int32_t k = op.fanin_begin + 1; k < op.fanin_end; ++k) {
                    const std::uint64_t v = words[fanins_[k]];
                    switch (op.kind) {
                        case GateKind::And: acc &= v; break;
                        case GateKind::Nand: acc = ~(acc & v); break;
                        case GateKind::Or: acc |= v; break;
                        case GateKind::Nor: acc = ~(acc | v); break;
                        case GateKind::Xor: acc ^= v; break;
                        case GateKind::Xnor: acc = ~(acc ^ v); break;
                        default: break;
                    }
                }
            }
        }
        words[op.out] = acc & mask;
    }
}

void Evaluator::run_packed(const Pattern* patterns, std::size_t count,
                           std::vector<std::uint64_t>& words) const {
    if (count > kLanes) throw Error("run_packed: more than 64 lanes");
    std::vector<std::uint64_t> in_words(input_count_, 0);
    for (std::size_t j = 0; j < count; ++j) {
        if (patterns[j].width() != input_count_)
            throw Error("pattern width " + std::to_string(patterns[j].width()) +
                        " != input count " + std::to_string(input_count_));
        for (std::size_t i = 0; i < input_count_; ++i)
            if (patterns[j].bits[i]) in_words[i] |= 1ull << j;
    }
    run_packed_words(in_words.data(), count, words);
}

std::vector<std::uint8_t> Evaluator::output_bits(const std::vector<std::uint8_t>& values) const {
    std::vector<std::uint8_t> out;
    out.reserve(output_indices_.size());
    for (int idx : output_indices_) out.push_back(values[idx]);
    return out;
}

EvalResult evaluate(const Netlist& n, const Pattern& p) {
    Evaluator ev(n);
    std::vector<std::uint8_t> values;
    ev.run(p, values);
    EvalResult r;
    r.outputs = ev.output_bits(values);
    const auto& names = ev.net_names();
    for (std::size_t i = 0; i < names.size(); ++i) r.internals[names[i]] = values[i];
    return r;
}

std::uint64_t PackedBlock::word(const std::string& net) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == net) return words[i];
    throw Error("unknown net: " + net);
}

bool PackedBlock::bit(const std::string& net, std::size_t lane) const {
    return (word(net) >> lane) & 1;
}

PackedBlock evaluate_packed(const Netlist& n, const std::vector<Pattern>& patterns) {
    Evaluator ev(n);
    PackedBlock b;
    b.lane_count = patterns.size();
    ev.run_packed(patterns.data(), patterns.size(), b.words);
    b.names = ev.net_names();
    return b;
}

Pattern random_pattern_at(std::size_t index, std::size_t width, std::uint64_t seed) {
    Pattern p;
    p.bits.resize(width);
    const std::size_t nwords = (width + 63) / 64;
    for (std::size_t b = 0; b < nwords; ++b) {
        const std::uint64_t w = rng::at(seed, index * nwords + b);
        const std::size_t lo = b * 64;
        const std::size_t hi = std::min(width, lo + 64);
        for (std::size_t i = lo; i < hi; ++i) p.bits[i] = (w >> (i - lo)) & 1;
    }
    return p;
}

std::vector<Pattern> random_patterns(std::size_t count, std::size_t width, std::uint64_t seed) {
    std::vector<Pattern> out;
    out.reserve(count);
    for (std::size_t j = 0; j < count; ++j) out.push_back(random_pattern_at(j, width, seed));
    return out;
}

std::vector<Pattern> read_patterns(std::istream& in) {
    std::vector<Pattern> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::size_t a = line.find_first_not_of(" \t");
        if (a == std::string::npos) continue;
        std::size_t z = line.find_last_not_of(" \t");
        out.push_back(Pattern::from_string(line.substr(a, z - a + 1)));
    }
    return out;
}

std::vector<Pattern> read_patterns_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return read_patterns(in);
}

void write_patterns(std::ostream& out, const std::vector<Pattern>& pats) {
    for (const auto& p : pats) out << p.to_string() << "\n";
}

}  // namespace hwt
