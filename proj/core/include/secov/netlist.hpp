#pragma once

#include "secov/error.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace secov {

using NetId = std::uint32_t;
using CellId = std::uint32_t;
inline constexpr NetId kNoNet = static_cast<NetId>(-1);

/// Primitive cell library. Combinational kinds have fixed arity
/// (NOT/BUF: 1, MUX2: 3, the rest: 2) and one output. DFF carries data,
/// clock, an optional async active-low reset and a reset/initial value.
enum class CellKind : std::uint8_t {
    AND, OR, NAND, NOR, XOR, XNOR, NOT, BUF, MUX2, CONST0, CONST1, DFF
};

const char* cell_kind_name(CellKind k);
std::optional<CellKind> cell_kind_from_name(std::string_view name);
int cell_arity(CellKind k); // input count; DFF reported as 2 (data, clock)

enum class NetOrigin : std::uint8_t { Design, Monitor };

/// Single-bit net. Buses are blasted to nets named "base[i]".
struct Net {
    NetId id = kNoNet;
    std::string name;
    NetOrigin origin = NetOrigin::Design;
};

/// One primitive instance. `inputs` layout:
///   combinational: per-kind arity, in declaration order
///   DFF:           [data, clock] or [data, clock, rstn]
/// MUX2 pin order is (select, a, b) with out = a when select=0, b when select=1.
struct Cell {
    CellKind kind;
    std::string name;
    std::vector<NetId> inputs;
    NetId output = kNoNet;
    bool reset_value = false; // DFF: async reset target and initial state
};

/// Declared bus: nets named "base[msb]" .. "base[lsb]".
struct Bus {
    std::string base;
    int msb = 0;
    int lsb = 0;
    std::vector<NetId> bits; // msb first
};

/// Immutable elaborated circuit graph. Construct through NetlistBuilder or
/// parse_netlist; after build() all invariants hold (unique names, single
/// driver per net, acyclic combinational subgraph, single clock/reset).
class Netlist {
  public:
    const std::vector<Cell>& cells() const { return cells_; }
    const std::vector<Net>& nets() const { return nets_; }
    const std::vector<NetId>& primary_inputs() const { return primary_inputs_; }
    const std::vector<NetId>& primary_outputs() const { return primary_outputs_; }
    std::optional<NetId> clock() const { return clock_; }
    std::optional<NetId> reset() const { return reset_; }
    const std::vector<Bus>& buses() const { return buses_; }

    const Net& net(NetId id) const { return nets_.at(id); }
    const Cell& cell(CellId id) const { return cells_.at(id); }
    const std::string& net_name(NetId id) const { return nets_.at(id).name; }

    std::optional<NetId> find_net(std::string_view name) const;
    const Bus* find_bus(std::string_view base) const;

    /// Driving cell of a net, or nullopt for primary inputs.
    std::optional<CellId> driver(NetId id) const;
    /// Cells reading a net (through any input pin, including DFF pins).
    const std::vector<CellId>& readers(NetId id) const { return readers_.at(id); }

    bool is_primary_input(NetId id) const;

    /// Combinational cells in dependency order (DFFs excluded). Ready cells
    /// are emitted smallest-name-first, so the order is deterministic.
    const std::vector<CellId>& topo_order() const { return topo_; }

    /// Design-origin nets excluding clock and reset, sorted by name. These
    /// are the coverage-denominator nodes; monitor-origin nets never appear.
    const std::vector<NetId>& nodes() const { return nodes_; }

    std::size_t dff_count() const { return dff_cells_.size(); }
    const std::vector<CellId>& dff_cells() const { return dff_cells_; }

    Netlist() = default; // empty; meaningful instances come from a builder

  private:
    friend class NetlistBuilder;

    std::vector<Cell> cells_;
    std::vector<Net> nets_;
    std::vector<NetId> primary_inputs_;
    std::vector<NetId> primary_outputs_;
    std::optional<NetId> clock_;
    std::optional<NetId> reset_;
    std::vector<Bus> buses_;

    // derived at build()
    std::vector<std::int64_t> driver_;
    std::vector<std::vector<CellId>> readers_;
    std::vector<CellId> topo_;
    std::vector<NetId> nodes_;
    std::vector<CellId> dff_cells_;
};

/// Mutable staging area for netlist construction. build() elaborates and
/// validates; the builder is left empty afterwards.
class NetlistBuilder {
  public:
    NetId add_net(std::string name, NetOrigin origin = NetOrigin::Design);
    /// Declares a bus and its blasted bit nets; returns them msb-first.
    std::vector<NetId> add_bus(const std::string& base, int msb, int lsb,
                               NetOrigin origin = NetOrigin::Design);
    /// Records a bus group over already-added nets (merging netlists).
    void register_bus(const std::string& base, int msb, int lsb, std::vector<NetId> bits);
    CellId add_cell(CellKind kind, std::string name, std::vector<NetId> inputs,
                    NetId output, bool reset_value = false);

    void mark_input(NetId id);
    void mark_output(NetId id);

    std::optional<NetId> find_net(std::string_view name) const;
    bool has_cell_name(std::string_view name) const;
    std::size_t net_count() const { return nets_.size(); }

    /// Elaborates. Throws Error/ParseError on: duplicate names, dangling
    /// references, multiple or missing drivers, mixed clocks, non-input
    /// clock/reset, clock used as data, combinational cycles.
    Netlist build();

  private:
    std::vector<Cell> cells_;
    std::vector<Net> nets_;
    std::vector<NetId> inputs_;
    std::vector<NetId> outputs_;
    std::vector<Bus> buses_;
    std::map<std::string, NetId, std::less<>> by_name_;
};

// --- text format -------------------------------------------------------

/// Parses the structural netlist format (see README for the grammar).
/// With a `module` header, all nets must be declared. Without one,
/// undeclared scalar nets are inferred: never driven -> primary input,
/// driven -> wire (and primary output when nothing reads them).
Netlist parse_netlist(std::string_view text);

/// Canonical text form; parse(print(parse(t))) is structurally equal to
/// parse(t).
std::string print_netlist(const Netlist& n, const std::string& module_name = "main");

/// Debug dump (nets with origins, cells, buses) as a JSON document.
std::string netlist_to_json(const Netlist& n);

/// True when the two netlists describe the same circuit: equal net names /
/// origins, equal buses, and cell-for-cell equal connectivity by name.
bool structurally_equal(const Netlist& a, const Netlist& b);

/// Name-sorted coverage-denominator nodes (see Netlist::nodes).
std::vector<NetId> list_nodes(const Netlist& n);

// --- simulation --------------------------------------------------------

/// Cycle-addressed stimulus for every primary input except the clock.
/// values[c][i] is the bit for signals[i] at cycle c.
struct Stimulus {
    std::vector<std::string> signals;
    std::vector<std::vector<std::uint8_t>> values;

    static Stimulus from_cycles(const std::vector<std::map<std::string, bool>>& cycles);
};

/// Dense two-valued trace: values[c][net_id].
struct Trace {
    std::vector<std::vector<std::uint8_t>> values;

    std::size_t cycle_count() const { return values.size(); }
    bool at(std::size_t cycle, NetId id) const { return values[cycle][id] != 0; }
};

/// Value override for fault injection: the net's driven value at `cycle`
/// is complemented before fanout sees it.
struct Flip {
    NetId net = kNoNet;
    int cycle = 0;
};

/// Cycle-accurate two-valued simulation.
/// Per cycle: primary inputs load from the stimulus, DFF outputs present
/// rv when reset is active (rstn=0) else the stored state, combinational
/// cells evaluate in topo order. State update: rv under active reset,
/// else the data input value. Initial state is the DFF reset value.
/// The clock net is excluded from stimulus and carries constant 0.
Trace simulate(const Netlist& n, const Stimulus& stimulus,
               std::optional<Flip> flip = std::nullopt);

} // namespace secov
