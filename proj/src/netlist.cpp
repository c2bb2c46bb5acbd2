#include "hwt/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <optional>
#include <queue>
#include <sstream>

#include "hwt/rng.hpp"

namespace hwt {

namespace {

const char* kKindNames[] = {"AND", "NAND", "OR", "NOR", "XOR", "XNOR", "NOT", "BUF", "CONST0", "CONST1"};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

const char* gate_kind_name(GateKind k) { return kKindNames[static_cast<int>(k)]; }

bool gate_kind_from_name(const std::string& s, GateKind& out) {
    for (int i = 0; i < 10; ++i) {
        if (s == kKindNames[i]) {
            out = static_cast<GateKind>(i);
            return true;
        }
    }
    return false;
}

bool Netlist::is_input(const std::string& net) const {
    return std::find(inputs.begin(), inputs.end(), net) != inputs.end();
}

bool Netlist::has_net(const std::string& net) const {
    if (is_input(net)) return true;
    for (const auto& g : gates)
        if (g.output == net) return true;
    return false;
}

void Netlist::validate() const {
    std::unordered_map<std::string, int> driver;
    for (const auto& in : inputs) {
        if (!driver.emplace(in, -1).second)
            throw ParseError(ParseErrorKind::DuplicateDriver, 0, 0, "duplicate driver for net '" + in + "'");
    }
    for (int i = 0; i < static_cast<int>(gates.size()); ++i) {
        const Gate& g = gates[i];
        if (!driver.emplace(g.output, i).second)
            throw ParseError(ParseErrorKind::DuplicateDriver, 0, 0, "duplicate driver for net '" + g.output + "'");
        const std::size_t arity = g.fanins.size();
        switch (g.kind) {
            case GateKind::Not:
            case GateKind::Buf:
                if (arity != 1) throw Error("gate '" + g.output + "': NOT/BUF requires exactly 1 fanin");
                break;
            case GateKind::Const0:
            case GateKind::Const1:
                if (arity != 0) throw Error("gate '" + g.output + "': CONST takes no fanins");
                break;
            default:
                if (arity < 2) throw Error("gate '" + g.output + "': needs at least 2 fanins");
        }
    }
    for (const auto& g : gates) {
        for (const auto& f : g.fanins) {
            if (!driver.count(f))
                throw ParseError(ParseErrorKind::UndrivenNet, 0, 0, "undriven net '" + f + "' feeding '" + g.output + "'");
        }
    }
    {
        std::unordered_map<std::string, bool> seen;
        for (const auto& o : outputs) {
            if (seen[o]) throw ParseError(ParseErrorKind::Syntax, 0, 0, "duplicate OUTPUT '" + o + "'");
            seen[o] = true;
            if (!driver.count(o)) throw ParseError(ParseErrorKind::UndrivenNet, 0, 0, "undriven OUTPUT '" + o + "'");
        }
    }
    topo_order(*this);  // throws on a combinational cycle
}

std::vector<int> topo_order(const Netlist& n) {
    const int ng = static_cast<int>(n.gates.size());
    std::unordered_map<std::string, int> gate_of;
    gate_of.reserve(ng);
    for (int i = 0; i < ng; ++i) gate_of.emplace(n.gates[i].output, i);

    std::vector<int> indegree(ng, 0);
    std::vector<std::vector<int>> consumers(ng);
    for (int i = 0; i < ng; ++i) {
        for (const auto& f : n.gates[i].fanins) {
            auto it = gate_of.find(f);
            if (it != gate_of.end()) {
                ++indegree[i];
                consumers[it->second].push_back(i);
            }
        }
    }
    std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
    for (int i = 0; i < ng; ++i)
        if (indegree[i] == 0) ready.push(i);

    std::vector<int> order;
    order.reserve(ng);
    while (!ready.empty()) {
        int g = ready.top();
        ready.pop();
        order.push_back(g);
        for (int c : consumers[g])
            if (--indegree[c] == 0) ready.push(c);
    }
    if (static_cast<int>(order.size()) != ng) {
        for (int i = 0; i < ng; ++i)
            if (indegree[i] > 0)
                throw ParseError(ParseErrorKind::Cycle, 0, 0, "combinational cycle through net '" + n.gates[i].output + "'");
    }
    return order;
}

// ---------------------------------------------------------------- bench I/O

namespace {

struct LineScanner {
    const std::string& s;
    int line;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }
    bool eol() {
        skip_ws();
        return pos >= s.size();
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(ParseErrorKind::Syntax, line, static_cast<int>(pos) + 1, msg);
    }
    std::string ident() {
        skip_ws();
        if (pos >= s.size() || !is_ident_start(s[pos])) fail("expected identifier");
        std::size_t start = pos;
        while (pos < s.size() && is_ident_char(s[pos])) ++pos;
        return s.substr(start, pos - start);
    }
    void expect(char c) {
        skip_ws();
        if (pos >= s.size() || s[pos] != c) fail(std::string("expected '") + c + "'");
        ++pos;
    }
    bool consume(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
};

}  // namespace

Netlist parse_bench(std::istream& in) {
    Netlist n;
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        // `# name: <id>` carries the netlist name; other comments are dropped.
        std::string line = raw;
        auto hash = line.find('#');
        if (hash != std::string::npos) {
            std::string comment = line.substr(hash + 1);
            line.erase(hash);
            std::istringstream cs(comment);
            std::string word;
            if (cs >> word && word == "name:" && (cs >> word)) n.name = word;
        }
        LineScanner sc{line, lineno};
        if (sc.eol()) continue;

        std::string first = sc.ident();
        if (first == "INPUT" || first == "OUTPUT") {
            sc.expect('(');
            std::string net = sc.ident();
            sc.expect(')');
            if (!sc.eol()) sc.fail("trailing characters");
            if (first == "INPUT")
                n.inputs.push_back(net);
            else
                n.outputs.push_back(net);
            continue;
        }
        sc.expect('=');
        std::string kind_name = sc.ident();
        GateKind kind;
        if (!gate_kind_from_name(kind_name, kind)) sc.fail("unknown gate kind '" + kind_name + "'");
        sc.expect('(');
        Gate g{first, kind, {}};
        if (!sc.consume(')')) {
            g.fanins.push_back(sc.ident());
            while (sc.consume(',')) g.fanins.push_back(sc.ident());
            sc.expect(')');
        }
        if (!sc.eol()) sc.fail("trailing characters");
        n.gates.push_back(std::move(g));
    }
    n.validate();
    return n;
}

Netlist parse_bench_string(const std::string& text) {
    std::istringstream in(text);
    return parse_bench(in);
}

Netlist parse_bench_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return parse_bench(in);
}

std::string emit_bench(const Netlist& n) {
    std::ostringstream out;
    if (n.name != "bench") out << "# name: " << n.name << "\n";
    for (const auto& in : n.inputs) out << "INPUT(" << in << ")\n";
    for (const auto& o : n.outputs) out << "OUTPUT(" << o << ")\n";
    for (const auto& g : n.gates) {
        out << g.output << " = " << gate_kind_name(g.kind) << "(";
        for (std::size_t i = 0; i < g.fanins.size(); ++i) {
            if (i) out << ", ";
            out << g.fanins[i];
        }
        out << ")\n";
    }
    return out.str();
}

void emit_bench_file(const Netlist& n, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << emit_bench(n);
}

// ------------------------------------------------------------ constant sweep

namespace {

// Binary step of the left fold with one constant side.
// Returns {result-net-negated?, folded-to-const?}: applies the identity /
// annihilator of `kind` for constant `c` against a live operand.
struct FoldAcc {
    bool is_const = false;
    bool const_val = false;
    std::string net;     // valid when !is_const
    bool negated = false;
};

FoldAcc apply_const(GateKind kind, FoldAcc live, bool c) {
    switch (kind) {
        case GateKind::And:
            if (!c) return {true, false, {}, false};
            return live;
        case GateKind::Nand:
            if (!c) return {true, true, {}, false};
            live.negated = !live.negated;
            return live;
        case GateKind::Or:
            if (c) return {true, true, {}, false};
            return live;
        case GateKind::Nor:
            if (c) return {true, false, {}, false};
            live.negated = !live.negated;
            return live;
        case GateKind::Xor:
            if (c) live.negated = !live.negated;
            return live;
        case GateKind::Xnor:
            if (!c) live.negated = !live.negated;
            return live;
        default:
            throw Error("apply_const: not a folding kind");
    }
}

bool eval_const_pair(GateKind kind, bool a, bool b) {
    switch (kind) {
        case GateKind::And: return a && b;
        case GateKind::Nand: return !(a && b);
        case GateKind::Or: return a || b;
        case GateKind::Nor: return !(a || b);
        case GateKind::Xor: return a != b;
        case GateKind::Xnor: return a == b;
        default: throw Error("eval_const_pair: not a folding kind");
    }
}

}  // namespace

Netlist constant_sweep(const Netlist& n, const std::map<std::string, bool>& pins) {
    for (const auto& [net, value] : pins) {
        (void)value;
        if (!n.has_net(net)) throw Error("constant_sweep: unknown pin '" + net + "'");
    }

    Netlist out;
    out.name = n.name;
    out.outputs = n.outputs;
    for (const auto& in : n.inputs)
        if (!pins.count(in)) out.inputs.push_back(in);

    std::unordered_map<std::string, bool> known;  // net -> constant value
    for (const auto& [net, value] : pins) known[net] = value;

    int tmp_counter = 0;
    auto fresh_net = [&] { return "__t_sw" + std::to_string(tmp_counter++); };

    std::vector<Gate> result;
    auto emit = [&](Gate g) { result.push_back(std::move(g)); };

    // Materialize the accumulator as a plain net (inserting a NOT if needed).
    auto materialize = [&](FoldAcc& acc) {
        if (acc.negated) {
            std::string t = fresh_net();
            emit({t, GateKind::Not, {acc.net}});
            acc.net = t;
            acc.negated = false;
        }
    };

    const std::vector<int> order = topo_order(n);
    for (int gi : order) {
        const Gate& g = n.gates[gi];

        if (auto it = pins.find(g.output); it != pins.end()) {
            known[g.output] = it->second;
            emit({g.output, it->second ? GateKind::Const1 : GateKind::Const0, {}});
            continue;
        }
        if (g.kind == GateKind::Const0 || g.kind == GateKind::Const1) {
            known[g.output] = g.kind == GateKind::Const1;
            emit(g);
            continue;
        }
        if (g.kind == GateKind::Buf || g.kind == GateKind::Not) {
            const bool inv = g.kind == GateKind::Not;
            auto it = known.find(g.fanins[0]);
            if (it != known.end()) {
                bool v = it->second != inv;
                known[g.output] = v;
                emit({g.output, v ? GateKind::Const1 : GateKind::Const0, {}});
            } else {
                emit(g);
            }
            continue;
        }

        bool any_const = false;
        for (const auto& f : g.fanins) any_const |= known.count(f) != 0;
        if (!any_const) {
            emit(g);
            continue;
        }

        // Left fold with constant elimination at each binary step.
        std::optional<FoldAcc> acc;
        for (const auto& f : g.fanins) {
            auto kit = known.find(f);
            const bool f_const = kit != known.end();
            if (!acc) {
                if (f_const)
                    acc = FoldAcc{true, kit->second, {}, false};
                else
                    acc = FoldAcc{false, false, f, false};
                continue;
            }
            if (acc->is_const && f_const) {
                acc->const_val = eval_const_pair(g.kind, acc->const_val, kit->second);
            } else if (acc->is_const) {
                FoldAcc live{false, false, f, false};
                *acc = apply_const(g.kind, live, acc->const_val);
            } else if (f_const) {
                *acc = apply_const(g.kind, *acc, kit->second);
            } else {
                materialize(*acc);
                std::string t = fresh_net();
                emit({t, g.kind, {acc->net, f}});
                acc = FoldAcc{false, false, t, false};
            }
        }

        if (acc->is_const) {
            known[g.output] = acc->const_val;
            emit({g.output, acc->const_val ? GateKind::Const1 : GateKind::Const0, {}});
        } else if (!result.empty() && !acc->negated && result.back().output == acc->net &&
                   acc->net.rfind("__t_sw", 0) == 0) {
            result.back().output = g.output;  // fold landed on the last chain gate
        } else {
            emit({g.output, acc->negated ? GateKind::Not : GateKind::Buf, {acc->net}});
        }
    }

    // An output that was itself a pinned primary input still needs a driver.
    for (const auto& o : out.outputs) {
        if (auto it = pins.find(o); it != pins.end() && n.is_input(o)) {
            result.push_back({o, it->second ? GateKind::Const1 : GateKind::Const0, {}});
        }
    }

    // Drop gates that reach no output.
    std::unordered_map<std::string, int> driver;
    for (int i = 0; i < static_cast<int>(result.size()); ++i) driver[result[i].output] = i;
    std::vector<bool> live(result.size(), false);
    std::vector<std::string> work(out.outputs.begin(), out.outputs.end());
    while (!work.empty()) {
        std::string net = std::move(work.back());
        work.pop_back();
        auto it = driver.find(net);
        if (it == driver.end() || live[it->second]) continue;
        live[it->second] = true;
        for (const auto& f : result[it->second].fanins) work.push_back(f);
    }
    for (int i = 0; i < static_cast<int>(result.size()); ++i)
        if (live[i]) out.gates.push_back(std::move(result[i]));

    out.validate();
    return out;
}

// --------------------------------------------------------------- generators

namespace {

void check_width(BenchmarkKind kind, int width) {
    int lo = 0, hi = 0;
    switch (kind) {
        case BenchmarkKind::Multiplier: lo = 4; hi = 16; break;
        case BenchmarkKind::XorTree: lo = 8; hi = 64; break;
        case BenchmarkKind::SboxNetwork: lo = 16; hi = 64; break;
    }
    if (width < lo || width > hi)
        throw Error(std::string(benchmark_kind_name(kind)) + ": width " + std::to_string(width) +
                    " outside [" + std::to_string(lo) + "," + std::to_string(hi) + "]");
}

Netlist gen_multiplier(int w) {
    Netlist n;
    n.name = "mult" + std::to_string(w) + "x" + std::to_string(w);
    for (int i = 0; i < w; ++i) n.inputs.push_back("a" + std::to_string(i));
    for (int i = 0; i < w; ++i) n.inputs.push_back("b" + std::to_string(i));
    for (int i = 0; i < 2 * w; ++i) n.outputs.push_back("p" + std::to_string(i));

    auto add_gate = [&](const std::string& out, GateKind k, std::vector<std::string> fi) {
        n.gates.push_back({out, k, std::move(fi)});
        return out;
    };
    auto pp = [&](int i, int j) { return "pp" + std::to_string(i) + "_" + std::to_string(j); };
    for (int i = 0; i < w; ++i)
        for (int j = 0; j < w; ++j)
            add_gate(pp(i, j), GateKind::And, {"a" + std::to_string(i), "b" + std::to_string(j)});

    // Carry-save column reduction: column c collects the partial products
    // with i+j = c; full/half adders shrink each column to a single bit.
    int tmp = 0;
    auto t = [&] { return "m" + std::to_string(tmp++); };
    // Bits landing in column 2w (carry chains off the top) are identically
    // zero for a w x w product and are simply not wired anywhere.
    std::vector<std::deque<std::string>> col(2 * w + 1);
    for (int i = 0; i < w; ++i)
        for (int j = 0; j < w; ++j) col[i + j].push_back(pp(i, j));

    for (int c = 0; c < 2 * w; ++c) {
        while (col[c].size() >= 2) {
            if (col[c].size() >= 3) {
                std::string x = col[c][0], y = col[c][1], z = col[c][2];
                col[c].pop_front();
                col[c].pop_front();
                col[c].pop_front();
                std::string s = add_gate(t(), GateKind::Xor, {x, y, z});
                std::string c1 = add_gate(t(), GateKind::And, {x, y});
                std::string c2 = add_gate(t(), GateKind::And, {x, z});
                std::string c3 = add_gate(t(), GateKind::And, {y, z});
                std::string cy = add_gate(t(), GateKind::Or, {c1, c2, c3});
                col[c].push_back(s);
                col[c + 1].push_back(cy);
            } else {
                std::string x = col[c][0], y = col[c][1];
                col[c].pop_front();
                col[c].pop_front();
                std::string s = add_gate(t(), GateKind::Xor, {x, y});
                std::string cy = add_gate(t(), GateKind::And, {x, y});
                col[c].push_back(s);
                col[c + 1].push_back(cy);
            }
        }
    }
    for (int c = 0; c < 2 * w; ++c) {
        if (col[c].empty())
            add_gate("p" + std::to_string(c), GateKind::Const0, {});
        else
            add_gate("p" + std::to_string(c), GateKind::Buf, {col[c].front()});
    }
    n.validate();
    return n;
}

Netlist gen_xor_tree(int width, std::uint64_t seed) {
    Netlist n;
    n.name = "xortree" + std::to_string(width);
    for (int i = 0; i < width; ++i) n.inputs.push_back("x" + std::to_string(i));
    rng::Stream rs(seed, "xor_tree");
    const int n_out = std::max(2, width / 2);
    int tmp = 0;
    for (int o = 0; o < n_out; ++o) {
        const int size = 2 + static_cast<int>(rs.next_below(static_cast<std::uint64_t>(width - 1)));
        std::vector<int> idx(width);
        for (int i = 0; i < width; ++i) idx[i] = i;
        for (int i = 0; i < size; ++i) {
            int j = i + static_cast<int>(rs.next_below(static_cast<std::uint64_t>(width - i)));
            std::swap(idx[i], idx[j]);
        }
        std::vector<std::string> level;
        for (int i = 0; i < size; ++i) level.push_back("x" + std::to_string(idx[i]));
        while (level.size() > 2) {
            std::vector<std::string> next;
            for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
                std::string name = "t" + std::to_string(tmp++);
                n.gates.push_back({name, GateKind::Xor, {level[i], level[i + 1]}});
                next.push_back(name);
            }
            if (level.size() % 2) next.push_back(level.back());
            level = std::move(next);
        }
        std::string out = "y" + std::to_string(o);
        if (level.size() == 2)
            n.gates.push_back({out, GateKind::Xor, {level[0], level[1]}});
        else
            n.gates.push_back({out, GateKind::Buf, {level[0]}});
        n.outputs.push_back(out);
    }
    n.validate();
    return n;
}

// Two layers of keyed 4-wire boxes (each box output is one random cube over
// its wires), a wire shuffle between layers, and an XOR mixing stage. The
// cube nets are the circuit's rare signals.
Netlist gen_sbox_network(int width, std::uint64_t seed) {
    Netlist n;
    n.name = "sbox" + std::to_string(width);
    for (int i = 0; i < width; ++i) n.inputs.push_back("x" + std::to_string(i));
    rng::Stream rs(seed, "sbox_network");

    auto shuffle = [&](std::vector<std::string>& v) {
        for (std::size_t i = 0; i + 1 < v.size(); ++i) {
            std::size_t j = i + rs.next_below(v.size() - i);
            std::swap(v[i], v[j]);
        }
    };

    auto build_layer = [&](const std::vector<std::string>& wires, const std::string& prefix) {
        std::vector<std::string> outs;
        const int nw = static_cast<int>(wires.size());
        for (int base = 0, box = 0; base < nw; base += 4, ++box) {
            const int g = std::min(4, nw - base);
            std::string bp = prefix + "b" + std::to_string(box);
            std::unordered_map<int, std::string> inverted;  // local wire -> NOT net
            auto literal = [&](int local, bool positive) -> std::string {
                if (positive) return wires[base + local];
                auto it = inverted.find(local);
                if (it != inverted.end()) return it->second;
                std::string name = bp + "_n" + std::to_string(local);
                n.gates.push_back({name, GateKind::Not, {wires[base + local]}});
                inverted.emplace(local, name);
                return name;
            };
            for (int o = 0; o < g; ++o) {
                std::string out = bp + "_o" + std::to_string(o);
                if (g == 1) {
                    n.gates.push_back({out, GateKind::Not, {wires[base]}});
                } else {
                    const int u = 2 + static_cast<int>(rs.next_below(static_cast<std::uint64_t>(g - 1)));
                    std::vector<int> pick(g);
                    for (int i = 0; i < g; ++i) pick[i] = i;
                    for (int i = 0; i < u; ++i) {
                        int j = i + static_cast<int>(rs.next_below(static_cast<std::uint64_t>(g - i)));
                        std::swap(pick[i], pick[j]);
                    }
                    std::vector<std::string> lits;
                    for (int i = 0; i < u; ++i) lits.push_back(literal(pick[i], rs.next_bit()));
                    n.gates.push_back({out, GateKind::And, std::move(lits)});
                }
                outs.push_back(out);
            }
        }
        return outs;
    };

    std::vector<std::string> l1 = build_layer(n.inputs, "l1");
    std::vector<std::string> l1s = l1;
    shuffle(l1s);
    std::vector<std::string> l2 = build_layer(l1s, "l2");
    std::vector<std::string> mix = l1;
    shuffle(mix);
    for (int i = 0; i < width; ++i) {
        std::string out = "y" + std::to_string(i);
        n.gates.push_back({out, GateKind::Xor, {l2[i % l2.size()], mix[i % mix.size()]}});
        n.outputs.push_back(out);
    }
    n.validate();
    return n;
}

}  // namespace

const char* benchmark_kind_name(BenchmarkKind k) {
    switch (k) {
        case BenchmarkKind::Multiplier: return "multiplier";
        case BenchmarkKind::XorTree: return "xor_tree";
        case BenchmarkKind::SboxNetwork: return "sbox_network";
    }
    return "?";
}

bool benchmark_kind_from_name(const std::string& s, BenchmarkKind& out) {
    if (s == "multiplier") out = BenchmarkKind::Multiplier;
    else if (s == "xor_tree") out = BenchmarkKind::XorTree;
    else if (s == "sbox_network") out = BenchmarkKind::SboxNetwork;
    else return false;
    return true;
}

Netlist gen_benchmark(BenchmarkKind kind, int width, std::uint64_t seed) {
    check_width(kind, width);
    switch (kind) {
        case BenchmarkKind::Multiplier: {
            Netlist n = gen_multiplier(width);
            n.name += "_s" + std::to_string(seed);
            return n;
        }
        case BenchmarkKind::XorTree: {
            Netlist n = gen_xor_tree(width, seed);
            n.name += "_s" + std::to_string(seed);
            return n;
        }
        case BenchmarkKind::SboxNetwork: {
            Netlist n = gen_sbox_network(width, seed);
            n.name += "_s" + std::to_string(seed);
            return n;
        }
    }
    throw Error("unreachable");
}

}  // namespace hwt
