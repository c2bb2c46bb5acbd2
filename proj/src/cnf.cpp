#include "hwt/cnf.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace hwt {

int Cnf::named_var(const std::string& label, const std::string& net) {
    auto key = std::make_pair(label, net);
    auto it = names_.find(key);
    if (it != names_.end()) throw Error("cnf: duplicate name (" + label + ", " + net + ")");
    int v = new_var();
    names_.emplace(std::move(key), v);
    return v;
}

int Cnf::var_of(const std::string& label, const std::string& net) const {
    auto it = names_.find({label, net});
    if (it == names_.end()) throw Error("cnf: unknown name (" + label + ", " + net + ")");
    return it->second;
}

bool Cnf::has_name(const std::string& label, const std::string& net) const {
    return names_.count({label, net}) != 0;
}

void Cnf::add_clause(std::vector<int> lits) {
    if (lits.empty()) throw Error("cnf: empty clause");
    for (int l : lits) {
        if (l == 0 || std::abs(l) > num_vars_) throw Error("cnf: literal out of range");
    }
    clauses_.push_back(std::move(lits));
}

namespace {

// y <-> op(a, b) for the six folding kinds.
void emit_binary(Cnf& cnf, GateKind kind, int y, int a, int b) {
    switch (kind) {
        case GateKind::And:
            cnf.add_clause({-y, a});
            cnf.add_clause({-y, b});
            cnf.add_clause({y, -a, -b});
            break;
        case GateKind::Nand:
            cnf.add_clause({y, a});
            cnf.add_clause({y, b});
            cnf.add_clause({-y, -a, -b});
            break;
        case GateKind::Or:
            cnf.add_clause({y, -a});
            cnf.add_clause({y, -b});
            cnf.add_clause({-y, a, b});
            break;
        case GateKind::Nor:
            cnf.add_clause({-y, -a});
            cnf.add_clause({-y, -b});
            cnf.add_clause({y, a, b});
            break;
        case GateKind::Xor:
            cnf.add_clause({-y, a, b});
            cnf.add_clause({-y, -a, -b});
            cnf.add_clause({y, -a, b});
            cnf.add_clause({y, a, -b});
            break;
        case GateKind::Xnor:
            cnf.add_clause({y, a, b});
            cnf.add_clause({y, -a, -b});
            cnf.add_clause({-y, -a, b});
            cnf.add_clause({-y, a, -b});
            break;
        default:
            throw Error("emit_binary: not a folding kind");
    }
}

}  // namespace

std::unordered_map<std::string, int> tseitin_append(Cnf& cnf, const Netlist& n,
                                                    const std::string& label,
                                                    const std::unordered_map<std::string, int>& bound) {
    std::unordered_map<std::string, int> var;
    var.reserve(n.inputs.size() + n.gates.size());
    auto var_for = [&](const std::string& net) {
        auto it = var.find(net);
        if (it != var.end()) return it->second;
        auto bit = bound.find(net);
        int v = bit != bound.end() ? bit->second : cnf.named_var(label, net);
        var.emplace(net, v);
        return v;
    };
    for (const auto& in : n.inputs) var_for(in);

    for (int gi : topo_order(n)) {
        const Gate& g = n.gates[gi];
        const int y = var_for(g.output);
        switch (g.kind) {
            case GateKind::Const0:
                cnf.add_clause({-y});
                break;
            case GateKind::Const1:
                cnf.add_clause({y});
                break;
            case GateKind::Buf: {
                int a = var_for(g.fanins[0]);
                cnf.add_clause({-y, a});
                cnf.add_clause({y, -a});
                break;
            }
            case GateKind::Not: {
                int a = var_for(g.fanins[0]);
                cnf.add_clause({-y, -a});
                cnf.add_clause({y, a});
                break;
            }
            default: {
                // Left fold: intermediate steps get anonymous variables.
                int acc = var_for(g.fanins[0]);
                for (std::size_t k = 1; k < g.fanins.size(); ++k) {
                    const int out = k + 1 == g.fanins.size() ? y : cnf.new_var();
                    emit_binary(cnf, g.kind, out, acc, var_for(g.fanins[k]));
                    acc = out;
                }
            }
        }
    }
    return var;
}

Cnf tseitin_encode(const Netlist& n, const std::string& label) {
    Cnf cnf;
    tseitin_append(cnf, n, label);
    return cnf;
}

std::string to_dimacs(const Cnf& cnf) {
    std::ostringstream out;
    out << "p cnf " << cnf.num_vars() << " " << cnf.clauses().size() << "\n";
    for (const auto& cl : cnf.clauses()) {
        for (int l : cl) out << l << " ";
        out << "0\n";
    }
    return out.str();
}

void write_dimacs(const Cnf& cnf, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << to_dimacs(cnf);
}

std::vector<std::uint8_t> parse_dimacs_model(std::istream& in, int num_vars) {
    std::vector<std::uint8_t> model(num_vars + 1, 0);
    std::string tok;
    while (in >> tok) {
        if (tok == "v" || tok == "s" || tok == "SAT" || tok == "SATISFIABLE") continue;
        if (tok == "UNSAT" || tok == "UNSATISFIABLE") throw Error("model: solver reported UNSAT");
        long v = std::stol(tok);
        if (v == 0) continue;
        const long a = std::labs(v);
        if (a > num_vars) throw Error("model: literal out of range");
        model[a] = v > 0 ? 1 : 0;
    }
    return model;
}

std::string name_map_to_csv(const Cnf& cnf) {
    std::ostringstream out;
    out << "label,net,var\n";
    for (const auto& [key, v] : cnf.name_map()) out << key.first << "," << key.second << "," << v << "\n";
    return out.str();
}

}  // namespace hwt
