#include "hwt/miter.hpp"

#include <unordered_map>

namespace hwt {

AuxCircuit build_aux(const Netlist& n) {
    for (const auto& in : n.inputs)
        if (in.rfind("__t_", 0) == 0) throw Error("build_aux: reserved prefix __t_ already taken");
    for (const auto& g : n.gates)
        if (g.output.rfind("__t_", 0) == 0) throw Error("build_aux: reserved prefix __t_ already taken");
    for (const auto& o : n.outputs)
        if (n.is_input(o)) throw Error("build_aux: output '" + o + "' driven by a primary input");

    AuxCircuit a;
    a.base = n;
    a.aux = n;
    a.aux.name = n.name + "_aux";
    Netlist& aux = a.aux;

    for (std::size_t i = 0; i < n.inputs.size(); ++i) {
        std::string k = "__t_kt" + std::to_string(i);
        aux.inputs.push_back(k);
        a.kt.push_back(k);
    }
    for (std::size_t j = 0; j < n.outputs.size(); ++j) {
        std::string k = "__t_kp" + std::to_string(j);
        aux.inputs.push_back(k);
        a.kp.push_back(k);
    }

    std::vector<std::string> cmp;
    for (std::size_t i = 0; i < n.inputs.size(); ++i) {
        std::string c = "__t_cmp" + std::to_string(i);
        aux.gates.push_back({c, GateKind::Xnor, {n.inputs[i], a.kt[i]}});
        cmp.push_back(c);
    }
    int counter = 0;
    while (cmp.size() > 1) {
        std::vector<std::string> next;
        for (std::size_t i = 0; i + 1 < cmp.size(); i += 2) {
            std::string t = "__t_cmpand" + std::to_string(counter++);
            aux.gates.push_back({t, GateKind::And, {cmp[i], cmp[i + 1]}});
            next.push_back(t);
        }
        if (cmp.size() % 2) next.push_back(cmp.back());
        cmp = std::move(next);
    }
    a.match_net = "__t_m";
    aux.gates.push_back({a.match_net, GateKind::Buf, {cmp[0]}});

    // Re-route every output through XOR with the masked payload key.
    std::unordered_map<std::string, std::string> renamed;
    for (const auto& o : n.outputs) renamed[o] = "__t_y_" + o;
    for (auto& g : aux.gates) {
        if (auto it = renamed.find(g.output); it != renamed.end()) g.output = it->second;
        for (auto& f : g.fanins)
            if (auto it = renamed.find(f); it != renamed.end()) f = it->second;
    }
    for (std::size_t j = 0; j < n.outputs.size(); ++j) {
        const std::string& o = n.outputs[j];
        std::string mask = "__t_mask" + std::to_string(j);
        aux.gates.push_back({mask, GateKind::And, {a.match_net, a.kp[j]}});
        aux.gates.push_back({o, GateKind::Xor, {renamed.at(o), mask}});
    }
    aux.validate();
    return a;
}

DetectionMiter::DetectionMiter(const AuxCircuit& aux) : base_eval_(aux.base) {
    // Shared variables for X and K_P.
    std::unordered_map<std::string, int> shared;
    for (const auto& in : aux.base.inputs) {
        int v = cnf_.named_var("X", in);
        shared[in] = v;
        x_.push_back(v);
    }
    for (const auto& k : aux.kp) {
        int v = cnf_.named_var("KP", k);
        shared[k] = v;
        kp_.push_back(v);
    }
    auto va = tseitin_append(cnf_, aux.aux, "A", shared);
    auto vb = tseitin_append(cnf_, aux.aux, "B", shared);
    for (const auto& k : aux.kt) {
        kta_.push_back(va.at(k));
        ktb_.push_back(vb.at(k));
    }
    for (const auto& o : aux.base.outputs) {
        out_a_.push_back(va.at(o));
        out_b_.push_back(vb.at(o));
    }

    // Output disequality: OR over per-bit XOR difference variables.
    std::vector<int> diff;
    for (std::size_t j = 0; j < out_a_.size(); ++j) {
        const int d = cnf_.new_var();
        const int ya = out_a_[j], yb = out_b_[j];
        cnf_.add_clause({-d, ya, yb});
        cnf_.add_clause({-d, -ya, -yb});
        cnf_.add_clause({d, -ya, yb});
        cnf_.add_clause({d, ya, -yb});
        diff.push_back(d);
    }
    cnf_.add_clause(diff);
}

void DetectionMiter::add_io_constraint(const Pattern& di, const std::vector<std::uint8_t>& observed) {
    if (di.width() != x_.size()) throw Error("miter: DI width mismatch");
    if (observed.size() != out_a_.size()) throw Error("miter: observed width mismatch");

    // With X fixed, the golden cone is plain simulation and the comparator
    // collapses to [K_T = di].
    std::vector<std::uint8_t> values;
    base_eval_.run(di, values);
    const std::vector<std::uint8_t> golden = base_eval_.output_bits(values);

    for (const std::vector<int>* kt : {&kta_, &ktb_}) {
        const int m = cnf_.new_var();
        std::vector<int> all{m};
        for (std::size_t i = 0; i < kt->size(); ++i) {
            const int lit = di.bits[i] ? (*kt)[i] : -(*kt)[i];
            cnf_.add_clause({-m, lit});
            all.push_back(-lit);
        }
        cnf_.add_clause(all);
        for (std::size_t j = 0; j < kp_.size(); ++j) {
            if (golden[j] == observed[j]) {
                cnf_.add_clause({-m, -kp_[j]});
            } else {
                cnf_.add_clause({m});
                cnf_.add_clause({kp_[j]});
            }
        }
    }
}

Pattern DetectionMiter::extract_di(const std::vector<std::uint8_t>& model) const {
    Pattern p;
    p.bits.reserve(x_.size());
    for (int v : x_) p.bits.push_back(model.at(v));
    return p;
}

bool DetectionMiter::model_invariant_holds(const std::vector<std::uint8_t>& model) const {
    auto matches = [&](const std::vector<int>& kt) {
        for (std::size_t i = 0; i < kt.size(); ++i)
            if (model.at(kt[i]) != model.at(x_[i])) return false;
        return true;
    };
    return matches(kta_) != matches(ktb_);
}

Cnf build_detection_miter(const AuxCircuit& aux) { return DetectionMiter(aux).cnf(); }

}  // namespace hwt
