// Conflict-driven SAT engine with incremental clause addition and
// per-call assumptions.

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "hwt/cnf.hpp"

namespace hwt {

enum class SolveStatus { Sat, Unsat, Budget };

struct SolveResult {
    SolveStatus status = SolveStatus::Budget;
    std::vector<std::uint8_t> model;  // indexed by variable; [0] unused
    std::uint64_t conflicts = 0;
    std::uint64_t decisions = 0;
};

struct SolveBudget {
    std::uint64_t max_conflicts = 0;  // 0 = unlimited
    double max_seconds = 0.0;         // 0 = unlimited
};

// Accumulate clauses + per-call assumptions; backends are interchangeable.
class SatEngine {
  public:
    virtual ~SatEngine() = default;
    virtual int new_var() = 0;
    virtual void ensure_vars(int n) = 0;
    virtual void add_clause(const std::vector<int>& lits) = 0;
    virtual SolveResult solve(const std::vector<int>& assumptions, const SolveBudget& budget) = 0;
    SolveResult solve(const std::vector<int>& assumptions = {}) { return solve(assumptions, {}); }
};

// Built-in engine: two-watched-literal propagation, 1UIP learning, VSIDS
// with seeded tie jitter, phase saving, Luby restarts. Every model is
// re-checked against the problem clauses before it is returned.
class CdclSolver final : public SatEngine {
  public:
    explicit CdclSolver(std::uint64_t seed = 1);
    ~CdclSolver() override;

    int new_var() override;
    void ensure_vars(int n) override;
    void add_clause(const std::vector<int>& lits) override;
    void load(const Cnf& cnf);
    // Re-randomizes saved phases so later solves pick different models.
    void reseed(std::uint64_t seed);

    SolveResult solve(const std::vector<int>& assumptions, const SolveBudget& budget) override;
    using SatEngine::solve;

    int var_count() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

SolveResult solve_cnf(const Cnf& cnf, const std::vector<int>& assumptions = {},
                      const SolveBudget& budget = {}, std::uint64_t seed = 1);

}  // namespace hwt
