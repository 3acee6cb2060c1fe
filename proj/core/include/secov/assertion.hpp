#pragma once

#include "secov/error.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace secov {

/// Named bit patterns (msb first) for equality mnemonics like OP_STORE.
using ConstantTable = std::map<std::string, std::vector<bool>>;

/// One entry of an assertion file: `name: <text>`. The text may carry its
/// clock and disable condition inline (SVA property form) or as trailing
/// `@clock <id>` / `disable (<expr>)` attributes.
struct AssertionSpec {
    std::string name;
    std::string source;
};

struct AssertionFile {
    ConstantTable constants;
    std::vector<AssertionSpec> assertions;
};

AssertionFile parse_assertion_file(std::string_view text);

// --- AST -----------------------------------------------------------------

enum class ExprKind : std::uint8_t { Const, Signal, Not, And, Or, EqConst, OneHot0, Rose };

struct Expr {
    ExprKind kind;
    bool cval = false;              // Const
    std::string name;               // Signal / EqConst / OneHot0
    std::vector<bool> pattern;      // EqConst, msb first
    bool negated = false;           // EqConst: true for != forms
    std::vector<std::unique_ptr<Expr>> args;

    /// Elaborated weight: equality counts its width, $onehot0 its pair
    /// network. Used by the monitor-size regression bound.
    int size() const;
};

enum class PropKind : std::uint8_t {
    Plain,            // P
    Imply,            // P -> Q and P |-> Q (same cycle)
    NonOverlapImply,  // P |=> Q (next cycle)
};

struct AssertionAst {
    std::string name;
    bool always = true;
    PropKind prop = PropKind::Plain;
    std::unique_ptr<Expr> lhs; // antecedent; null for Plain
    std::unique_ptr<Expr> rhs; // consequent or plain property
    std::unique_ptr<Expr> disable;
    std::string clock;

    int size() const;
};

/// Parses the supported grammar: `assert always { stmt };`,
/// `assert property (@(posedge clk) disable iff (e) stmt);`, or a bare
/// statement; boolean ops ! && ||, equality of a bus with a constant
/// (==, !=, and their 4-state spellings under two-valued reading),
/// $rose(expr), $onehot0(bus), and -> / |-> / |=> at statement level.
AssertionAst parse_assertion(const AssertionSpec& spec, const ConstantTable& constants = {});

/// Signals an assertion observes. Buses from equality have the pattern
/// width; $onehot0 buses report width 0 until resolved against a design.
struct ReferencedSignals {
    std::vector<std::string> scalars;       // sorted, unique
    std::map<std::string, int> buses;       // base -> width (0 = unresolved)
};

ReferencedSignals referenced_signals(const AssertionAst& ast);

// --- golden interpreter ----------------------------------------------------

/// Name-addressed trace for the interpreter; bus bits appear as "base[i]".
struct SignalTrace {
    std::vector<std::string> signals;
    std::vector<std::vector<std::uint8_t>> values; // [cycle][signal]

    std::size_t cycle_count() const { return values.size(); }
};

enum class Verdict : std::uint8_t { Pass, Fail, Disabled };

/// Reference semantics, cycle by cycle:
///  - $rose(e) at t>0 is e[t-1]=0 and e[t]=1; at t=0 it is false.
///  - P -> Q and P |-> Q fail at t when P and !Q hold at t.
///  - P |=> Q arms at t when P holds (and t is not disabled) and fails at
///    t+1 when Q is false there; attempts never arm or fail on disabled
///    cycles.
///  - a cycle with the disable condition true reports Disabled.
/// Without `always` only the attempt starting at cycle 0 is checked.
std::vector<Verdict> interpret(const AssertionAst& ast, const SignalTrace& trace);

} // namespace secov
