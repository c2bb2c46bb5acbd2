#include "hwt/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>

#include "hwt/rng.hpp"

namespace hwt {

namespace {

// Internal literal: 2*var + sign, variables 0-based.
inline int ilit(int ext) {
    const int v = std::abs(ext) - 1;
    return 2 * v + (ext < 0 ? 1 : 0);
}
inline int ivar(int lit) { return lit >> 1; }
inline bool isign(int lit) { return lit & 1; }

constexpr std::int8_t kUndef = -1;

std::uint64_t luby(std::uint64_t i) {
    // Knuth's formulation of the Luby sequence.
    std::uint64_t k = 1;
    while ((1ull << k) < i + 2) ++k;
    while ((1ull << (k - 1)) - 1 != i) {
        i -= (1ull << (k - 1)) - 1;
        k = 1;
        while ((1ull << k) < i + 2) ++k;
    }
    return 1ull << (k - 1);
}

}  // namespace

struct Clause {
    float act = 0.0f;
    bool learned = false;
    std::vector<int> lits;  // internal literals; lits[0], lits[1] watched
};

struct CdclSolver::Impl {
    // clause arena
    std::vector<Clause*> problem;
    std::vector<Clause*> learned;

    struct Watch {
        Clause* cl;
        int blocker;
    };
    std::vector<std::vector<Watch>> watches;  // by internal literal

    std::vector<std::int8_t> assign;   // by var: kUndef / 0 / 1
    std::vector<int> level;            // by var
    std::vector<Clause*> reason;       // by var
    std::vector<double> activity;      // by var
    std::vector<std::uint8_t> phase;   // saved polarity
    std::vector<char> seen;

    std::vector<int> trail;
    std::vector<int> trail_lim;
    std::size_t qhead = 0;

    // decision heap ordered by activity
    std::vector<int> heap;      // heap of vars
    std::vector<int> heap_pos;  // var -> index in heap, -1 if absent

    double var_inc = 1.0;
    double var_decay = 0.95;
    double cla_inc = 1.0;
    bool ok = true;
    rng::Stream rnd{1};
    double random_decision_freq = 0.02;
    std::size_t learned_cap = 50000;

    std::uint64_t total_conflicts = 0;

    ~Impl() {
        for (Clause* c : problem) delete c;
        for (Clause* c : learned) delete c;
    }

    int nvars() const { return static_cast<int>(assign.size()); }

    std::int8_t value(int lit) const {
        const std::int8_t a = assign[ivar(lit)];
        return a == kUndef ? kUndef : static_cast<std::int8_t>(a ^ static_cast<std::int8_t>(isign(lit)));
    }

    int decision_level() const { return static_cast<int>(trail_lim.size()); }

    // ---- heap ----
    bool heap_less(int a, int b) const { return activity[a] > activity[b]; }
    void heap_up(int i) {
        int v = heap[i];
        while (i > 0) {
            int p = (i - 1) / 2;
            if (!heap_less(v, heap[p])) break;
            heap[i] = heap[p];
            heap_pos[heap[i]] = i;
            i = p;
        }
        heap[i] = v;
        heap_pos[v] = i;
    }
    void heap_down(int i) {
        int v = heap[i];
        const int n = static_cast<int>(heap.size());
        while (true) {
            int c = 2 * i + 1;
            if (c >= n) break;
            if (c + 1 < n && heap_less(heap[c + 1], heap[c])) ++c;
            if (!heap_less(heap[c], v)) break;
            heap[i] = heap[c];
            heap_pos[heap[i]] = i;
            i = c;
        }
        heap[i] = v;
        heap_pos[v] = i;
    }
    void heap_insert(int v) {
        if (heap_pos[v] >= 0) return;
        heap.push_back(v);
        heap_pos[v] = static_cast<int>(heap.size()) - 1;
        heap_up(heap_pos[v]);
    }
    int heap_pop() {
        int v = heap[0];
        heap_pos[v] = -1;
        heap[0] = heap.back();
        heap.pop_back();
        if (!heap.empty()) {
            heap_pos[heap[0]] = 0;
            heap_down(0);
        }
        return v;
    }

    void bump_var(int v) {
        activity[v] += var_inc;
        if (activity[v] > 1e100) {
            for (auto& a : activity) a *= 1e-100;
            var_inc *= 1e-100;
        }
        if (heap_pos[v] >= 0) heap_up(heap_pos[v]);
    }
    void bump_clause(Clause* c) {
        c->act += static_cast<float>(cla_inc);
        if (c->act > 1e20f) {
            for (Clause* l : learned) l->act *= 1e-20f;
            cla_inc *= 1e-20;
        }
    }

    // ---- assignment ----
    void unchecked_enqueue(int lit, Clause* from) {
        const int v = ivar(lit);
        assign[v] = isign(lit) ? 0 : 1;
        level[v] = decision_level();
        reason[v] = from;
        trail.push_back(lit);
    }

    void cancel_until(int lvl) {
        if (decision_level() <= lvl) return;
        const int bound = trail_lim[lvl];
        for (int i = static_cast<int>(trail.size()) - 1; i >= bound; --i) {
            const int v = ivar(trail[i]);
            phase[v] = assign[v];
            assign[v] = kUndef;
            reason[v] = nullptr;
            heap_insert(v);
        }
        trail.resize(bound);
        trail_lim.resize(lvl);
        qhead = trail.size();
    }

    Clause* propagate() {
        while (qhead < trail.size()) {
            const int p = trail[qhead++];
            // watchers are filed under the negation of the watched literal,
            // so the list for p holds clauses whose watched literal just
            // became false
            auto& ws = watches[p];
            std::size_t i = 0, j = 0;
            const std::size_t n = ws.size();
            while (i < n) {
                Watch w = ws[i];
                if (value(w.blocker) == 1) {
                    ws[j++] = w;
                    ++i;
                    continue;
                }
                Clause& c = *w.cl;
                const int false_lit = p ^ 1;
                if (c.lits[0] == false_lit) std::swap(c.lits[0], c.lits[1]);
                // c.lits[1] == false_lit now
                const int first = c.lits[0];
                if (first != w.blocker && value(first) == 1) {
                    ws[j++] = {w.cl, first};
                    ++i;
                    continue;
                }
                bool moved = false;
                for (std::size_t k = 2; k < c.lits.size(); ++k) {
                    if (value(c.lits[k]) != 0) {
                        std::swap(c.lits[1], c.lits[k]);
                        watches[c.lits[1] ^ 1].push_back({w.cl, first});
                        moved = true;
                        break;
                    }
                }
                if (moved) {
                    ++i;
                    continue;
                }
                // unit or conflict
                ws[j++] = {w.cl, first};
                ++i;
                if (value(first) == 0) {
                    // conflict: copy back remaining watchers and bail
                    while (i < n) ws[j++] = ws[i++];
                    ws.resize(j);
                    qhead = trail.size();
                    return w.cl;
                }
                unchecked_enqueue(first, w.cl);
            }
            ws.resize(j);
        }
        return nullptr;
    }

    void attach(Clause* c) {
        watches[c->lits[0] ^ 1].push_back({c, c->lits[1]});
        watches[c->lits[1] ^ 1].push_back({c, c->lits[0]});
    }

    void detach_all_and_rebuild() {
        for (auto& ws : watches) ws.clear();
        for (Clause* c : problem)
            if (c->lits.size() >= 2) attach(c);
        for (Clause* c : learned) attach(c);
    }

    bool locked(const Clause* c) const {
        const int v = ivar(c->lits[0]);
        return reason[v] == c && assign[v] != kUndef;
    }

    void reduce_learned() {
        std::sort(learned.begin(), learned.end(),
                  [](const Clause* a, const Clause* b) { return a->act < b->act; });
        std::vector<Clause*> keep;
        keep.reserve(learned.size() / 2 + 1);
        const std::size_t drop_target = learned.size() / 2;
        std::size_t dropped = 0;
        for (std::size_t i = 0; i < learned.size(); ++i) {
            Clause* c = learned[i];
            if (dropped < drop_target && !locked(c) && c->lits.size() > 2) {
                delete c;
                ++dropped;
            } else {
                keep.push_back(c);
            }
        }
        learned = std::move(keep);
        detach_all_and_rebuild();
    }

    // First-UIP conflict analysis; returns learnt clause + backjump level.
    void analyze(Clause* confl, std::vector<int>& learnt, int& bt_level) {
        learnt.clear();
        learnt.push_back(0);  // slot for the asserting literal
        int counter = 0;
        int p = -1;
        int index = static_cast<int>(trail.size()) - 1;
        Clause* c = confl;
        do {
            bump_clause(c);
            for (int q : c->lits) {
                if (p != -1 && q == p) continue;
                const int v = ivar(q);
                if (!seen[v] && level[v] > 0) {
                    seen[v] = 1;
                    bump_var(v);
                    if (level[v] >= decision_level())
                        ++counter;
                    else
                        learnt.push_back(q);
                }
            }
            while (!seen[ivar(trail[index])]) --index;
            p = trail[index];
            c = reason[ivar(p)];
            seen[ivar(p)] = 0;
            --counter;
        } while (counter > 0);
        learnt[0] = p ^ 1;

        bt_level = 0;
        if (learnt.size() > 1) {
            int max_i = 1;
            for (std::size_t i = 2; i < learnt.size(); ++i)
                if (level[ivar(learnt[i])] > level[ivar(learnt[max_i])]) max_i = static_cast<int>(i);
            std::swap(learnt[1], learnt[max_i]);
            bt_level = level[ivar(learnt[1])];
        }
        for (std::size_t i = 1; i < learnt.size(); ++i) seen[ivar(learnt[i])] = 0;
    }

    int pick_branch() {
        if (!heap.empty() && rnd.next_double() < random_decision_freq) {
            const int v = heap[rnd.next_below(heap.size())];
            if (assign[v] == kUndef) return v;
        }
        while (!heap.empty()) {
            const int v = heap_pop();
            if (assign[v] == kUndef) return v;
        }
        return -1;
    }
};

CdclSolver::CdclSolver(std::uint64_t seed) : impl_(new Impl) {
    impl_->rnd = rng::Stream(seed, "cdcl");
}
CdclSolver::~CdclSolver() = default;

int CdclSolver::var_count() const { return impl_->nvars(); }

int CdclSolver::new_var() {
    Impl& s = *impl_;
    const int v = s.nvars();
    s.assign.push_back(kUndef);
    s.level.push_back(0);
    s.reason.push_back(nullptr);
    s.activity.push_back(s.rnd.next_double() * 1e-6);  // seeded tie jitter
    s.phase.push_back(s.rnd.next_bit() ? 1 : 0);
    s.seen.push_back(0);
    s.watches.emplace_back();
    s.watches.emplace_back();
    s.heap_pos.push_back(-1);
    s.heap_insert(v);
    return v + 1;
}

void CdclSolver::ensure_vars(int n) {
    while (impl_->nvars() < n) new_var();
}

void CdclSolver::reseed(std::uint64_t seed) {
    Impl& s = *impl_;
    rng::Stream r(seed, "cdcl_reseed");
    for (auto& p : s.phase) p = r.next_bit() ? 1 : 0;
    s.rnd = r;
}

void CdclSolver::add_clause(const std::vector<int>& ext) {
    Impl& s = *impl_;
    if (!s.ok) return;
    if (ext.empty()) {
        s.ok = false;
        return;
    }
    std::vector<int> lits;
    lits.reserve(ext.size());
    for (int e : ext) {
        if (e == 0) throw Error("solver: zero literal");
        ensure_vars(std::abs(e));
        lits.push_back(ilit(e));
    }
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    for (std::size_t i = 0; i + 1 < lits.size(); ++i)
        if ((lits[i] ^ lits[i + 1]) == 1) return;  // tautology

    // strip literals already false at the top level, drop satisfied clauses
    std::vector<int> out;
    for (int l : lits) {
        const std::int8_t v = s.value(l);
        if (v == 1 && s.level[ivar(l)] == 0) return;
        if (v == 0 && s.level[ivar(l)] == 0) continue;
        out.push_back(l);
    }
    if (out.empty()) {
        s.ok = false;
        return;
    }
    if (out.size() == 1) {
        if (s.value(out[0]) == 0) {
            s.ok = false;
            return;
        }
        if (s.value(out[0]) == kUndef) {
            s.unchecked_enqueue(out[0], nullptr);
            if (s.propagate() != nullptr) s.ok = false;
        }
        return;
    }
    Clause* c = new Clause{0.0f, false, std::move(out)};
    s.problem.push_back(c);
    s.attach(c);
}

void CdclSolver::load(const Cnf& cnf) {
    ensure_vars(cnf.num_vars());
    for (const auto& cl : cnf.clauses()) add_clause(cl);
}

SolveResult CdclSolver::solve(const std::vector<int>& assumptions, const SolveBudget& budget) {
    Impl& s = *impl_;
    SolveResult res;
    if (!s.ok) {
        res.status = SolveStatus::Unsat;
        return res;
    }
    s.cancel_until(0);
    if (s.propagate() != nullptr) {
        s.ok = false;
        res.status = SolveStatus::Unsat;
        return res;
    }

    std::vector<int> assume;
    assume.reserve(assumptions.size());
    for (int e : assumptions) {
        if (e == 0 || std::abs(e) > s.nvars()) throw Error("solver: assumption out of range");
        assume.push_back(ilit(e));
    }

    const auto t0 = std::chrono::steady_clock::now();
    auto over_time = [&] {
        if (budget.max_seconds <= 0) return false;
        const auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0);
        return dt.count() > budget.max_seconds;
    };

    std::uint64_t conflicts_here = 0;
    std::uint64_t restart_no = 0;
    std::uint64_t restart_budget = 100 * luby(restart_no);
    std::uint64_t conflicts_since_restart = 0;
    std::vector<int> learnt;

    while (true) {
        Clause* confl = s.propagate();
        if (confl != nullptr) {
            ++conflicts_here;
            ++conflicts_since_restart;
            ++s.total_conflicts;
            if (s.decision_level() == 0) {
                s.ok = false;
                res.status = SolveStatus::Unsat;
                res.conflicts = conflicts_here;
                return res;
            }
            int bt = 0;
            s.analyze(confl, learnt, bt);
            s.cancel_until(bt);
            if (learnt.size() == 1) {
                s.unchecked_enqueue(learnt[0], nullptr);
            } else {
                Clause* c = new Clause{0.0f, true, learnt};
                s.learned.push_back(c);
                s.attach(c);
                s.bump_clause(c);
                s.unchecked_enqueue(learnt[0], c);
            }
            s.var_inc /= s.var_decay;
            s.cla_inc /= 0.999;

            if (budget.max_conflicts && conflicts_here >= budget.max_conflicts) {
                s.cancel_until(0);
                res.status = SolveStatus::Budget;
                res.conflicts = conflicts_here;
                return res;
            }
            if ((conflicts_here & 0x1FF) == 0 && over_time()) {
                s.cancel_until(0);
                res.status = SolveStatus::Budget;
                res.conflicts = conflicts_here;
                return res;
            }
            continue;
        }

        if (conflicts_since_restart >= restart_budget) {
            conflicts_since_restart = 0;
            restart_budget = 100 * luby(++restart_no);
            s.cancel_until(0);
            if (s.learned.size() > s.learned_cap) s.reduce_learned();
            continue;
        }

        // establish assumptions, then branch
        int next_lit = -1;
        bool assumption_conflict = false;
        while (s.decision_level() < static_cast<int>(assume.size())) {
            const int p = assume[s.decision_level()];
            if (s.value(p) == 1) {
                s.trail_lim.push_back(static_cast<int>(s.trail.size()));
            } else if (s.value(p) == 0) {
                assumption_conflict = true;
                break;
            } else {
                next_lit = p;
                break;
            }
        }
        if (assumption_conflict) {
            s.cancel_until(0);
            res.status = SolveStatus::Unsat;
            res.conflicts = conflicts_here;
            return res;
        }
        if (next_lit == -1) {
            const int v = s.pick_branch();
            if (v == -1) {
                // full assignment: snapshot, verify, succeed
                res.model.assign(s.nvars() + 1, 0);
                for (int var = 0; var < s.nvars(); ++var) res.model[var + 1] = s.assign[var] == 1;
                for (const Clause* c : s.problem) {
                    bool sat = false;
                    for (int l : c->lits)
                        if (s.value(l) == 1) {
                            sat = true;
                            break;
                        }
                    if (!sat) throw Error("solver: model fails verification (engine bug)");
                }
                for (int p : assume)
                    if (s.value(p) != 1) throw Error("solver: model violates assumption (engine bug)");
                s.cancel_until(0);
                res.status = SolveStatus::Sat;
                res.conflicts = conflicts_here;
                return res;
            }
            next_lit = 2 * v + (s.phase[v] ? 0 : 1);
        }
        s.trail_lim.push_back(static_cast<int>(s.trail.size()));
        s.unchecked_enqueue(next_lit, nullptr);
        ++res.decisions;
    }
}

SolveResult solve_cnf(const Cnf& cnf, const std::vector<int>& assumptions, const SolveBudget& budget,
                      std::uint64_t seed) {
    CdclSolver solver(seed);
    solver.load(cnf);
    return solver.solve(assumptions, budget);
}

}  // namespace hwt
