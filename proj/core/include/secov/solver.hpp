#pragma once

#include <cstdint>
#include <vector>

namespace secov {

/// A literal is 2*var + sign (sign 1 = negated).
using Var = std::int32_t;
using Lit = std::int32_t;

inline Lit mk_lit(Var v, bool neg = false) { return 2 * v + (neg ? 1 : 0); }
inline Lit lit_neg(Lit l) { return l ^ 1; }
inline Var lit_var(Lit l) { return l >> 1; }
inline bool lit_sign(Lit l) { return (l & 1) != 0; }

enum class SolveResult { Sat, Unsat, Unknown };

/// Conflict-driven clause-learning SAT solver: two-watched literals,
/// first-UIP learning, activity-ordered decisions with index tie-breaks,
/// phase saving and Luby restarts. Fully deterministic: no randomness,
/// resource limits are conflict counts.
class Solver {
  public:
    struct Stats {
        std::uint64_t conflicts = 0;
        std::uint64_t decisions = 0;
        std::uint64_t propagations = 0;
        std::uint64_t restarts = 0;
        std::uint64_t clauses = 0;
        std::uint64_t learned = 0;
    };

    Var new_var();
    int num_vars() const { return static_cast<int>(activity_.size()); }

    /// Returns false when the clause is already falsified at level 0
    /// (the instance is then unsatisfiable).
    bool add_clause(std::vector<Lit> lits);

    /// budget_conflicts < 0 means unlimited.
    SolveResult solve(std::int64_t budget_conflicts = -1);

    /// Valid after Sat. Unconstrained variables read false.
    bool model_value(Var v) const;

    const Stats& stats() const { return stats_; }

  private:
    struct Clause {
        std::vector<Lit> lits;
        bool learned = false;
        double activity = 0.0;
    };
    using ClauseRef = std::int32_t;
    static constexpr ClauseRef kNoClause = -1;

    // 0 = unassigned sentinel handling via assigns_ values: -1 unknown, 0 false, 1 true
    std::int8_t lit_value(Lit l) const {
        std::int8_t a = assigns_[lit_var(l)];
        if (a < 0) return -1;
        return lit_sign(l) ? static_cast<std::int8_t>(1 - a) : a;
    }

    void enqueue(Lit l, ClauseRef reason);
    ClauseRef propagate();
    void analyze(ClauseRef confl, std::vector<Lit>& learnt, int& bt_level);
    void backtrack(int level);
    Lit pick_branch();
    void bump_var(Var v);
    void decay_var_activity() { var_inc_ /= 0.95; }
    void bump_clause(Clause& c);
    void attach(ClauseRef cr);
    void reduce_learned();
    static std::int64_t luby(std::int64_t i);

    // heap keyed by activity, ties by smaller variable index
    bool heap_less(Var a, Var b) const {
        if (activity_[a] != activity_[b]) return activity_[a] > activity_[b];
        return a < b;
    }
    void heap_insert(Var v);
    void heap_update(Var v);
    Var heap_pop();
    void heap_sift_up(int i);
    void heap_sift_down(int i);

    std::vector<Clause> clauses_;
    std::vector<std::vector<ClauseRef>> watches_; // indexed by literal
    std::vector<std::int8_t> assigns_;            // indexed by var
    std::vector<bool> polarity_;
    std::vector<double> activity_;
    std::vector<ClauseRef> reason_;
    std::vector<std::int32_t> level_;
    std::vector<Lit> trail_;
    std::vector<std::int32_t> trail_lim_;
    std::size_t qhead_ = 0;

    std::vector<Var> heap_;
    std::vector<std::int32_t> heap_pos_;

    std::vector<bool> seen_;
    double var_inc_ = 1.0;
    double clause_inc_ = 1.0;
    bool ok_ = true;
    Stats stats_;
};

} // namespace secov
