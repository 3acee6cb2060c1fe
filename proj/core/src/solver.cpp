#include "secov/solver.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace secov {

Var Solver::new_var() {
    Var v = static_cast<Var>(activity_.size());
    activity_.push_back(0.0);
    assigns_.push_back(-1);
    polarity_.push_back(false);
    reason_.push_back(kNoClause);
    level_.push_back(0);
    seen_.push_back(false);
    watches_.emplace_back();
    watches_.emplace_back();
    heap_pos_.push_back(-1);
    heap_insert(v);
    return v;
}

bool Solver::add_clause(std::vector<Lit> lits) {
    if (!ok_) return false;
    assert(trail_lim_.empty());
    std::sort(lits.begin(), lits.end());
    std::vector<Lit> out;
    Lit prev = -1;
    for (Lit l : lits) {
        if (l == prev) continue;
        if (prev >= 0 && l == lit_neg(prev)) return true; // tautology
        std::int8_t v = lit_value(l);
        if (v == 1) return true; // satisfied at level 0
        if (v == 0) { prev = l; continue; } // falsified literal dropped
        out.push_back(l);
        prev = l;
    }
    if (out.empty()) {
        ok_ = false;
        return false;
    }
    if (out.size() == 1) {
        if (lit_value(out[0]) == 0) { ok_ = false; return false; }
        if (lit_value(out[0]) == -1) enqueue(out[0], kNoClause);
        if (propagate() != kNoClause) { ok_ = false; return false; }
        return true;
    }
    ClauseRef cr = static_cast<ClauseRef>(clauses_.size());
    clauses_.push_back(Clause{std::move(out), false, 0.0});
    attach(cr);
    ++stats_.clauses;
    return true;
}

void Solver::attach(ClauseRef cr) {
    const Clause& c = clauses_[cr];
    watches_[lit_neg(c.lits[0])].push_back(cr);
    watches_[lit_neg(c.lits[1])].push_back(cr);
}

void Solver::enqueue(Lit l, ClauseRef reason) {
    Var v = lit_var(l);
    assigns_[v] = lit_sign(l) ? 0 : 1;
    reason_[v] = reason;
    level_[v] = static_cast<std::int32_t>(trail_lim_.size());
    trail_.push_back(l);
}

Solver::ClauseRef Solver::propagate() {
    while (qhead_ < trail_.size()) {
        Lit p = trail_[qhead_++];
        ++stats_.propagations;
        auto& ws = watches_[p];
        std::size_t i = 0, j = 0;
        while (i < ws.size()) {
            ClauseRef cr = ws[i];
            Clause& c = clauses_[cr];
            // keep the watched literal for this list in position 1
            Lit false_lit = lit_neg(p);
            if (c.lits[0] == false_lit) std::swap(c.lits[0], c.lits[1]);
            if (lit_value(c.lits[0]) == 1) {
                ws[j++] = ws[i++];
                continue;
            }
            bool moved = false;
            for (std::size_t k = 2; k < c.lits.size(); ++k) {
                if (lit_value(c.lits[k]) != 0) {
                    std::swap(c.lits[1], c.lits[k]);
                    watches_[lit_neg(c.lits[1])].push_back(cr);
                    moved = true;
                    break;
                }
            }
            if (moved) {
                ++i;
                continue;
            }
            // unit or conflicting
            if (lit_value(c.lits[0]) == 0) {
                while (i < ws.size()) ws[j++] = ws[i++];
                ws.resize(j);
                return cr;
            }
            enqueue(c.lits[0], cr);
            ws[j++] = ws[i++];
        }
        ws.resize(j);
    }
    return kNoClause;
}

void Solver::bump_var(Var v) {
    activity_[v] += var_inc_;
    if (activity_[v] > 1e100) {
        for (auto& a : activity_) a *= 1e-100;
        var_inc_ *= 1e-100;
    }
    if (heap_pos_[v] >= 0) heap_update(v);
}

void Solver::bump_clause(Clause& c) {
    c.activity += clause_inc_;
    if (c.activity > 1e20) {
        for (auto& cl : clauses_)
            if (cl.learned) cl.activity *= 1e-20;
        clause_inc_ *= 1e-20;
    }
}

void Solver::analyze(ClauseRef confl, std::vector<Lit>& learnt, int& bt_level) {
    learnt.clear();
    learnt.push_back(0); // slot for the asserting literal
    int counter = 0;
    Lit p = -1;
    std::size_t index = trail_.size();
    int current_level = static_cast<int>(trail_lim_.size());

    do {
        assert(confl != kNoClause);
        Clause& c = clauses_[confl];
        if (c.learned) bump_clause(c);
        for (std::size_t k = (p == -1 ? 0 : 1); k < c.lits.size(); ++k) {
            Lit q = c.lits[k];
            Var v = lit_var(q);
            if (seen_[v] || level_[v] == 0) continue;
            seen_[v] = true;
            bump_var(v);
            if (level_[v] >= current_level) ++counter;
            else learnt.push_back(q);
        }
        while (!seen_[lit_var(trail_[index - 1])]) --index;
        --index;
        p = trail_[index];
        confl = reason_[lit_var(p)];
        if (confl != kNoClause) {
            // resolution expects the implied literal in slot 0
            Clause& rc = clauses_[confl];
            if (rc.lits[0] != p) {
                auto it = std::find(rc.lits.begin(), rc.lits.end(), p);
                if (it != rc.lits.end()) std::iter_swap(rc.lits.begin(), it);
            }
        }
        seen_[lit_var(p)] = false;
        --counter;
    } while (counter > 0);
    learnt[0] = lit_neg(p);

    // self-subsumption: drop literals whose reason is covered by the clause.
    // seen_ is still set exactly for the vars of learnt[1..] here.
    std::vector<Var> to_clear;
    for (std::size_t k = 1; k < learnt.size(); ++k) to_clear.push_back(lit_var(learnt[k]));
    std::vector<Lit> minimized;
    minimized.push_back(learnt[0]);
    for (std::size_t k = 1; k < learnt.size(); ++k) {
        Var v = lit_var(learnt[k]);
        ClauseRef r = reason_[v];
        bool redundant = false;
        if (r != kNoClause) {
            redundant = true;
            for (Lit q : clauses_[r].lits) {
                Var qv = lit_var(q);
                if (qv == v) continue;
                if (!seen_[qv] && level_[qv] > 0) {
                    redundant = false;
                    break;
                }
            }
        }
        if (!redundant) minimized.push_back(learnt[k]);
    }
    learnt = std::move(minimized);
    for (Var v : to_clear) seen_[v] = false;

    if (learnt.size() == 1) {
        bt_level = 0;
    } else {
        std::size_t max_i = 1;
        for (std::size_t k = 2; k < learnt.size(); ++k)
            if (level_[lit_var(learnt[k])] > level_[lit_var(learnt[max_i])]) max_i = k;
        std::swap(learnt[1], learnt[max_i]);
        bt_level = level_[lit_var(learnt[1])];
    }
}

void Solver::backtrack(int level) {
    if (static_cast<int>(trail_lim_.size()) <= level) return;
    for (std::size_t i = trail_.size(); i > static_cast<std::size_t>(trail_lim_[level]); --i) {
        Var v = lit_var(trail_[i - 1]);
        polarity_[v] = assigns_[v] == 1;
        assigns_[v] = -1;
        reason_[v] = kNoClause;
        if (heap_pos_[v] < 0) heap_insert(v);
    }
    trail_.resize(trail_lim_[level]);
    trail_lim_.resize(level);
    qhead_ = trail_.size();
}

Lit Solver::pick_branch() {
    while (!heap_.empty()) {
        Var v = heap_pop();
        if (assigns_[v] < 0) return mk_lit(v, !polarity_[v]);
    }
    return -1;
}

std::int64_t Solver::luby(std::int64_t i) {
    // value of the Luby sequence 1,1,2,1,1,2,4,... at index i (0-based)
    std::int64_t size = 1, seq = 0;
    while (size < i + 1) {
        ++seq;
        size = 2 * size + 1;
    }
    while (size - 1 != i) {
        size = (size - 1) >> 1;
        --seq;
        i = i % size;
    }
    return 1LL << seq;
}

void Solver::reduce_learned() {
    std::vector<ClauseRef> learned;
    for (ClauseRef cr = 0; cr < static_cast<ClauseRef>(clauses_.size()); ++cr)
        if (clauses_[cr].learned && !clauses_[cr].lits.empty()) learned.push_back(cr);
    if (learned.size() < 64) return;
    std::sort(learned.begin(), learned.end(), [&](ClauseRef a, ClauseRef b) {
        if (clauses_[a].activity != clauses_[b].activity)
            return clauses_[a].activity < clauses_[b].activity;
        return a < b;
    });
    std::vector<bool> locked(clauses_.size(), false);
    for (Lit l : trail_) {
        ClauseRef r = reason_[lit_var(l)];
        if (r != kNoClause) locked[r] = true;
    }
    std::vector<bool> dead(clauses_.size(), false);
    std::uint64_t dropped = 0;
    for (std::size_t k = 0; k < learned.size() / 2; ++k) {
        ClauseRef cr = learned[k];
        if (!locked[cr] && clauses_[cr].lits.size() > 2) {
            dead[cr] = true;
            ++dropped;
        }
    }
    for (auto& wl : watches_) {
        std::size_t j = 0;
        for (std::size_t i = 0; i < wl.size(); ++i)
            if (!dead[wl[i]]) wl[j++] = wl[i];
        wl.resize(j);
    }
    // clause slots stay (refs remain stable); bodies are emptied
    for (ClauseRef cr = 0; cr < static_cast<ClauseRef>(clauses_.size()); ++cr) {
        if (dead[cr]) {
            clauses_[cr].lits.clear();
            clauses_[cr].lits.shrink_to_fit();
            clauses_[cr].learned = false;
        }
    }
    stats_.learned -= dropped;
}

SolveResult Solver::solve(std::int64_t budget_conflicts) {
    if (!ok_) return SolveResult::Unsat;
    if (propagate() != kNoClause) {
        ok_ = false;
        return SolveResult::Unsat;
    }
    std::int64_t conflicts_total = 0;
    std::int64_t restart_round = 0;
    std::vector<Lit> learnt;

    for (;;) {
        std::int64_t restart_budget = 100 * luby(restart_round);
        std::int64_t conflicts_here = 0;
        bool restart = false;
        while (!restart) {
            ClauseRef confl = propagate();
            if (confl != kNoClause) {
                ++stats_.conflicts;
                ++conflicts_total;
                ++conflicts_here;
                if (trail_lim_.empty()) return SolveResult::Unsat;
                int bt = 0;
                analyze(confl, learnt, bt);
                backtrack(bt);
                if (learnt.size() == 1) {
                    enqueue(learnt[0], kNoClause);
                } else {
                    ClauseRef cr = static_cast<ClauseRef>(clauses_.size());
                    clauses_.push_back(Clause{learnt, true, 0.0});
                    bump_clause(clauses_.back());
                    attach(cr);
                    ++stats_.learned;
                    enqueue(learnt[0], cr);
                }
                decay_var_activity();
                clause_inc_ /= 0.999;
                if (budget_conflicts >= 0 && conflicts_total >= budget_conflicts)
                    return SolveResult::Unknown;
                if (conflicts_here >= restart_budget) restart = true;
                if (stats_.learned > 4000 + stats_.clauses) reduce_learned();
            } else {
                Lit next = pick_branch();
                if (next < 0) return SolveResult::Sat;
                ++stats_.decisions;
                trail_lim_.push_back(static_cast<std::int32_t>(trail_.size()));
                enqueue(next, kNoClause);
            }
        }
        ++stats_.restarts;
        ++restart_round;
        backtrack(0);
    }
}

bool Solver::model_value(Var v) const {
    if (v < 0 || v >= static_cast<Var>(assigns_.size())) return false;
    return assigns_[v] == 1;
}

// --- decision heap -------------------------------------------------------

void Solver::heap_insert(Var v) {
    heap_pos_[v] = static_cast<std::int32_t>(heap_.size());
    heap_.push_back(v);
    heap_sift_up(heap_pos_[v]);
}

void Solver::heap_update(Var v) { heap_sift_up(heap_pos_[v]); }

Var Solver::heap_pop() {
    Var top = heap_[0];
    heap_pos_[top] = -1;
    Var last = heap_.back();
    heap_.pop_back();
    if (!heap_.empty() && top != last) {
        heap_[0] = last;
        heap_pos_[last] = 0;
        heap_sift_down(0);
    }
    return top;
}

void Solver::heap_sift_up(int i) {
    Var v = heap_[i];
    while (i > 0) {
        int parent = (i - 1) / 2;
        if (!heap_less(v, heap_[parent])) break;
        heap_[i] = heap_[parent];
        heap_pos_[heap_[i]] = i;
        i = parent;
    }
    heap_[i] = v;
    heap_pos_[v] = i;
}

void Solver::heap_sift_down(int i) {
    Var v = heap_[i];
    int n = static_cast<int>(heap_.size());
    for (;;) {
        int child = 2 * i + 1;
        if (child >= n) break;
        if (child + 1 < n && heap_less(heap_[child + 1], heap_[child])) ++child;
        if (!heap_less(heap_[child], v)) break;
        heap_[i] = heap_[child];
        heap_pos_[heap_[i]] = i;
        i = child;
    }
    heap_[i] = v;
    heap_pos_[v] = i;
}

} // namespace secov
