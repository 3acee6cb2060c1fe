#include <doctest.h>

#include "secov/solver.hpp"

#include <random>
#include <vector>

using namespace secov;

namespace {

// Reference truth-table check for small formulas.
bool brute_sat(int nvars, const std::vector<std::vector<Lit>>& cnf) {
    for (std::uint32_t m = 0; m < (1u << nvars); ++m) {
        bool all = true;
        for (const auto& cl : cnf) {
            bool sat = false;
            for (Lit l : cl) {
                bool val = (m >> lit_var(l)) & 1;
                if (lit_sign(l)) val = !val;
                if (val) { sat = true; break; }
            }
            if (!sat) { all = false; break; }
        }
        if (all) return true;
    }
    return false;
}

SolveResult run(int nvars, const std::vector<std::vector<Lit>>& cnf,
                Solver* out = nullptr) {
    Solver s;
    for (int i = 0; i < nvars; ++i) s.new_var();
    bool ok = true;
    for (const auto& cl : cnf) ok = s.add_clause(cl) && ok;
    if (!ok) return SolveResult::Unsat;
    auto r = s.solve();
    if (out) *out = std::move(s);
    return r;
}

} // namespace

TEST_CASE("trivial instances") {
    CHECK(run(1, {{mk_lit(0)}}) == SolveResult::Sat);
    CHECK(run(1, {{mk_lit(0)}, {mk_lit(0, true)}}) == SolveResult::Unsat);
    CHECK(run(0, {}) == SolveResult::Sat);
}

TEST_CASE("unit propagation chains") {
    // x0, x0->x1, x1->x2, ~x2 is unsat
    std::vector<std::vector<Lit>> cnf = {
        {mk_lit(0)},
        {mk_lit(0, true), mk_lit(1)},
        {mk_lit(1, true), mk_lit(2)},
        {mk_lit(2, true)},
    };
    CHECK(run(3, cnf) == SolveResult::Unsat);
}

TEST_CASE("model satisfies the formula") {
    std::vector<std::vector<Lit>> cnf = {
        {mk_lit(0), mk_lit(1)},
        {mk_lit(0, true), mk_lit(2)},
        {mk_lit(1, true), mk_lit(2, true)},
    };
    Solver s;
    CHECK(run(3, cnf, &s) == SolveResult::Sat);
    auto value = [&](Lit l) {
        bool v = s.model_value(lit_var(l));
        return lit_sign(l) ? !v : v;
    };
    for (const auto& cl : cnf) {
        bool sat = false;
        for (Lit l : cl) sat = sat || value(l);
        CHECK(sat);
    }
}

TEST_CASE("pigeonhole 4 into 3 is unsat") {
    // var p*3+h: pigeon p in hole h
    std::vector<std::vector<Lit>> cnf;
    for (int p = 0; p < 4; ++p) {
        std::vector<Lit> at_least;
        for (int h = 0; h < 3; ++h) at_least.push_back(mk_lit(p * 3 + h));
        cnf.push_back(at_least);
    }
    for (int h = 0; h < 3; ++h)
        for (int p1 = 0; p1 < 4; ++p1)
            for (int p2 = p1 + 1; p2 < 4; ++p2)
                cnf.push_back({mk_lit(p1 * 3 + h, true), mk_lit(p2 * 3 + h, true)});
    CHECK(run(12, cnf) == SolveResult::Unsat);
}

TEST_CASE("random 3-SAT agrees with truth-table enumeration") {
    std::mt19937 rng(20240214);
    for (int round = 0; round < 300; ++round) {
        int nvars = 3 + static_cast<int>(rng() % 10);       // 3..12
        int nclauses = 2 + static_cast<int>(rng() % (4 * nvars));
        std::vector<std::vector<Lit>> cnf;
        for (int c = 0; c < nclauses; ++c) {
            std::vector<Lit> cl;
            int width = 1 + static_cast<int>(rng() % 3);
            for (int k = 0; k < width; ++k)
                cl.push_back(mk_lit(static_cast<Var>(rng() % nvars), rng() % 2 != 0));
            cnf.push_back(cl);
        }
        bool expect = brute_sat(nvars, cnf);
        auto got = run(nvars, cnf);
        REQUIRE(got != SolveResult::Unknown);
        CHECK((got == SolveResult::Sat) == expect);
    }
}

TEST_CASE("conflict budget yields Unknown") {
    // Hard instance: pigeonhole 7 into 6 with a budget of 1 conflict.
    std::vector<std::vector<Lit>> cnf;
    int P = 7, H = 6;
    for (int p = 0; p < P; ++p) {
        std::vector<Lit> al;
        for (int h = 0; h < H; ++h) al.push_back(mk_lit(p * H + h));
        cnf.push_back(al);
    }
    for (int h = 0; h < H; ++h)
        for (int p1 = 0; p1 < P; ++p1)
            for (int p2 = p1 + 1; p2 < P; ++p2)
                cnf.push_back({mk_lit(p1 * H + h, true), mk_lit(p2 * H + h, true)});
    Solver s;
    for (int i = 0; i < P * H; ++i) s.new_var();
    for (const auto& cl : cnf) REQUIRE(s.add_clause(cl));
    CHECK(s.solve(1) == SolveResult::Unknown);
}

TEST_CASE("solver is deterministic across runs") {
    std::mt19937 rng(7);
    std::vector<std::vector<Lit>> cnf;
    for (int c = 0; c < 120; ++c) {
        std::vector<Lit> cl;
        for (int k = 0; k < 3; ++k) cl.push_back(mk_lit(static_cast<Var>(rng() % 30), rng() % 2 != 0));
        cnf.push_back(cl);
    }
    Solver a, b;
    for (int i = 0; i < 30; ++i) { a.new_var(); b.new_var(); }
    for (const auto& cl : cnf) { a.add_clause(cl); b.add_clause(cl); }
    auto ra = a.solve();
    auto rb = b.solve();
    CHECK(ra == rb);
    CHECK(a.stats().conflicts == b.stats().conflicts);
    CHECK(a.stats().decisions == b.stats().decisions);
    if (ra == SolveResult::Sat)
        for (int v = 0; v < 30; ++v) CHECK(a.model_value(v) == b.model_value(v));
}
