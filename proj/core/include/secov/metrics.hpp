#pragma once

#include "secov/monitor.hpp"
#include "secov/netlist.hpp"
#include "secov/pathcheck.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace secov {

/// round to two decimals, half away from zero
double round2(double x);

/// Coverage of one assertion (or assertion set): covered / total nodes.
struct CoverageResult {
    std::string subject;
    std::size_t total_nodes = 0;
    std::size_t covered_nodes = 0;
    double coverage_pct = 0.0;             // round2(100 * covered / total)
    std::vector<std::string> covered_set;  // sorted node names; may be empty
                                           // for counts-only results
    std::uint64_t universe_hash = 0;       // identifies the node universe
};

/// Ratio arithmetic on published or external counts (no node detail).
CoverageResult coverage_from_counts(const std::string& subject, std::size_t covered,
                                    std::size_t total);

/// Counts Reachable verdicts over the node list. Unknown and
/// unreachable-at-bound verdicts are uncovered: coverage is a guarantee,
/// so the undecided side rounds down.
CoverageResult security_coverage(const std::string& subject,
                                 const std::map<NetId, PathVerdict>& verdicts,
                                 const std::vector<NetId>& nodes, const Netlist& n);

/// Union coverage over one shared node universe.
CoverageResult set_coverage(const std::vector<CoverageResult>& results,
                            const std::string& subject);

/// One synthesis-style measurement row: absolute area/power/timing.
struct SynthesisRecord {
    std::string name;
    double area = 0.0;
    double power = 0.0;
    double timing = 0.0;
};

/// Percentage deltas of one assertion against the baseline. Negative
/// deltas are kept as stored values (measurement noise) but contribute 0
/// to max_overhead_pct.
struct OverheadRecord {
    std::string name;
    double area_pct = 0.0;
    double power_pct = 0.0;
    double timing_pct = 0.0;
    double max_overhead_pct = 0.0;

    static OverheadRecord from_pcts(std::string name, double area, double power,
                                    double timing);
};

OverheadRecord overhead_from_reports(const SynthesisRecord& baseline,
                                     const SynthesisRecord& with_assertion);

/// CSV `name,area,power,timing` with one BASELINE row (absolute values).
std::vector<OverheadRecord> overheads_from_csv(std::string_view csv);

/// Cell weights for the proxy cost model. Defaults are unit weights with
/// weightless tie cells.
struct CostWeights {
    double weight(CellKind k) const;
    std::map<CellKind, double> override_weights;
};

/// Proxy overheads when no synthesis reports exist: area from weighted
/// monitor cell count, timing from the logic-depth delta of the bound
/// netlist, power from a weighted toggle count under a seeded reference
/// stimulus. Clearly a model, labeled as such in reports.
OverheadRecord model_overhead(const Netlist& design, const MonitorCircuit& monitor,
                              unsigned seed = 1, const CostWeights& weights = {});

// --- emission ------------------------------------------------------------

std::string coverage_csv(const std::vector<CoverageResult>& rows);
std::string verdict_csv(const Netlist& n, const std::map<NetId, PathVerdict>& verdicts,
                        bool with_timings);

} // namespace secov
