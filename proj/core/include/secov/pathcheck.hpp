#pragma once

#include "secov/netlist.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace secov {

/// One {origin, destination} pair. bound is the unrolling depth in cycles;
/// empty means auto: (min DFF crossings origin->destination) + 2, capped.
struct PathQuery {
    NetId origin = kNoNet;
    NetId destination = kNoNet;
    std::optional<int> bound;
};

enum class PathStatus : std::uint8_t {
    Reachable,
    UnreachableStructural,
    UnreachableAtBound,
    Unknown,
};

const char* path_status_name(PathStatus s);

/// Replayable evidence: complementing the origin's driven value at
/// flip_cycle under this stimulus changes the destination at diverge_cycle.
struct Witness {
    Stimulus stimulus;
    int flip_cycle = 0;
    int diverge_cycle = 0;
};

struct PathStats {
    int bound = 0;
    std::uint64_t conflicts = 0;
    std::uint64_t decisions = 0;
    std::uint64_t clauses = 0;
    std::uint64_t vars = 0;
    double solve_ms = 0.0;
};

struct PathVerdict {
    PathStatus status = PathStatus::Unknown;
    std::optional<Witness> witness;
    PathStats stats;
};

/// Directed structural connectivity in the cell graph; DFFs are traversed
/// as edges (data and reset pins reach the output, the clock pin does not).
bool structural_reach(const Netlist& n, NetId origin, NetId destination);

/// Minimum number of DFF crossings over any structural path, or nullopt
/// when no path exists. origin == destination gives 0.
std::optional<int> sequential_distance(const Netlist& n, NetId origin, NetId destination);

struct SensitizeOptions {
    std::int64_t budget_conflicts = 100000;
    int bound_cap = 16;
};

/// Bounded flip-fault sensitization, decided by CNF satisfiability over two
/// unrolled circuit copies that share primary inputs. The faulty copy uses
/// the complement of the origin's driven value at one flip cycle t; the
/// query is Reachable iff some stimulus makes the destination differ from
/// the fault-free run at a cycle t' with t <= t' < bound. Both copies start
/// from reset state. Every Reachable verdict carries a witness that has
/// been replayed through the simulator.
PathVerdict sensitize(const Netlist& n, const PathQuery& q,
                      const SensitizeOptions& opts = {});

/// Exhaustive oracle with the same post-condition as sensitize, evaluated
/// by state-pair search over all stimuli and flip cycles. Enforced limits:
/// <= 10 stimulus inputs, <= 6 DFFs, bound <= 5.
bool brute_force_reach(const Netlist& n, const PathQuery& q);

struct BatchOptions : SensitizeOptions {
    int jobs = 1;
    std::optional<int> bound; // applied to every query; empty = per-origin auto
};

/// Independent per-origin verdicts against one destination. A reverse
/// reachability pass prunes structurally dead origins without touching the
/// solver; per-query resource exhaustion yields Unknown and never aborts
/// the batch. Results are identical for any jobs value.
std::map<NetId, PathVerdict> batch_check(const Netlist& n, NetId destination,
                                         const std::vector<NetId>& origins,
                                         const BatchOptions& opts = {});

} // namespace secov
