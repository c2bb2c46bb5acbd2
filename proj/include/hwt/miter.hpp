// Auxiliary circuit (golden design + trigger/payload keys) and the
// two-copy detection miter.

#pragma once

#include <string>
#include <vector>

#include "hwt/cnf.hpp"
#include "hwt/netlist.hpp"
#include "hwt/sim.hpp"

namespace hwt {

// Golden circuit with one trigger-key input per primary input and one
// payload-key input per primary output. match = [X equals K_T]; each
// output turns into Y XOR (match AND K_P bit).
struct AuxCircuit {
    Netlist base;
    Netlist aux;
    std::vector<std::string> kt;  // trigger-key input names, base input order
    std::vector<std::string> kp;  // payload-key input names, base output order
    std::string match_net;
};

AuxCircuit build_aux(const Netlist& n);

// Two copies of the aux circuit sharing X and K_P, with independent
// K_Ta / K_Tb, and the output disequality asserted.
class DetectionMiter {
  public:
    explicit DetectionMiter(const AuxCircuit& aux);

    const Cnf& cnf() const { return cnf_; }

    // Constrain both copies to produce `observed` at input `di`
    // (the eliminated-candidate clauses added after each agreeing query).
    void add_io_constraint(const Pattern& di, const std::vector<std::uint8_t>& observed);

    Pattern extract_di(const std::vector<std::uint8_t>& model) const;
    // In every model exactly one of (K_Ta = X), (K_Tb = X) holds.
    bool model_invariant_holds(const std::vector<std::uint8_t>& model) const;

    const std::vector<int>& x_vars() const { return x_; }
    const std::vector<int>& kta_vars() const { return kta_; }
    const std::vector<int>& ktb_vars() const { return ktb_; }
    const std::vector<int>& kp_vars() const { return kp_; }

  private:
    Cnf cnf_;
    Evaluator base_eval_;
    std::vector<int> x_, kta_, ktb_, kp_, out_a_, out_b_;
};

Cnf build_detection_miter(const AuxCircuit& aux);

}  // namespace hwt
