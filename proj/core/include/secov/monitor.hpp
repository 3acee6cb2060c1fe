#pragma once

#include "secov/assertion.hpp"
#include "secov/netlist.hpp"

#include <map>
#include <string>
#include <vector>

namespace secov {

/// Compiled assertion checker. The fragment observes the assertion's
/// signals through primary inputs and drives a single `fail` output,
/// high exactly in the cycles the golden interpreter reports Fail.
struct MonitorCircuit {
    std::string name;
    Netlist fragment;
    NetId fail = kNoNet;
    /// assertion signal -> design net names (bus bits msb first)
    std::map<std::string, std::vector<std::string>> bindings;
    std::string clock; // design clock the fragment's history registers use
    bool has_state = false;

    std::size_t cell_count() const { return fragment.cells().size(); }
    std::size_t dff_count() const { return fragment.dff_count(); }
};

/// Bus widths the compiler needs: every bus the assertion references.
/// Equality widths come from the constant pattern; $onehot0 widths must be
/// resolved against a design.
using SignalWidths = std::map<std::string, int>;

/// Fills every referenced bus width from the pattern or the design's bus
/// table. Throws BindError when a bus is missing or pattern width clashes
/// with the design.
SignalWidths resolve_widths(const AssertionAst& ast, const Netlist& design);

/// Width resolution from patterns alone; $onehot0 buses stay unresolved
/// and make compile_to_monitor throw.
SignalWidths resolve_widths(const AssertionAst& ast);

/// Builds the monitor fragment from the primitive library. One history DFF
/// per $rose (previous value, initial 1 so cycle 0 never counts as a rise)
/// and one per |=> (armed-attempt bit, initial 0). Constants fold, so a
/// constant-true assertion compiles to fail = const0.
MonitorCircuit compile_to_monitor(const AssertionAst& ast, const SignalWidths& widths);

/// Merges a compiled monitor into a design. Monitor nets take the
/// "<name>." prefix and Monitor origin, observed signals rewire to the
/// design nets they name, and fail becomes a new primary output. The
/// design subgraph is untouched: monitors only observe.
Netlist bind(const Netlist& design, const MonitorCircuit& m);

/// Binds several monitors; each fail output appears in order.
Netlist bind_all(const Netlist& design, const std::vector<MonitorCircuit>& monitors);

} // namespace secov
