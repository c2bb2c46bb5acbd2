// CNF container, Tseitin encoding of netlists, DIMACS export.

#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hwt/netlist.hpp"

namespace hwt {

// Clauses hold nonzero signed literals, 1-indexed variables.
class Cnf {
  public:
    int num_vars() const { return num_vars_; }
    const std::vector<std::vector<int>>& clauses() const { return clauses_; }

    int new_var() { return ++num_vars_; }
    // Registers (label, net) -> var; the map is injective per (label, net).
    int named_var(const std::string& label, const std::string& net);
    int var_of(const std::string& label, const std::string& net) const;
    bool has_name(const std::string& label, const std::string& net) const;
    const std::map<std::pair<std::string, std::string>, int>& name_map() const { return names_; }

    void add_clause(std::vector<int> lits);

  private:
    int num_vars_ = 0;
    std::vector<std::vector<int>> clauses_;
    std::map<std::pair<std::string, std::string>, int> names_;
};

// Encodes `n` into `cnf` under `label`. Nets listed in `bound` reuse the
// given variables instead of fresh ones (used to share inputs between
// circuit copies). Returns the net -> var map for this instance.
std::unordered_map<std::string, int> tseitin_append(
    Cnf& cnf, const Netlist& n, const std::string& label,
    const std::unordered_map<std::string, int>& bound = {});

Cnf tseitin_encode(const Netlist& n, const std::string& label = "F");

std::string to_dimacs(const Cnf& cnf);
void write_dimacs(const Cnf& cnf, const std::string& path);
// `v ...` / bare literal lines of a solver's model output; returns values
// indexed by variable (index 0 unused).
std::vector<std::uint8_t> parse_dimacs_model(std::istream& in, int num_vars);
// Variable-name map CSV: label,net,var.
std::string name_map_to_csv(const Cnf& cnf);

}  // namespace hwt
