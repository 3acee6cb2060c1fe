#pragma once

#include "secov/assertion.hpp"
#include "secov/metrics.hpp"
#include "secov/monitor.hpp"
#include "secov/netlist.hpp"
#include "secov/pathcheck.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace secov {

/// One fully evaluated assertion: its cost and what it covers.
struct Candidate {
    std::string name;
    OverheadRecord overhead;
    CoverageResult coverage; // must carry the covered node set
};

enum class StrategyKind { FixedThreshold, DynamicThreshold };

struct StrategyConfig {
    StrategyKind kind = StrategyKind::FixedThreshold;
    double fixed_ratio = 10.0;        // required coverage per unit of overhead
    double overhead_multiplier = 2.0; // dynamic stage-1 cap vs population mean
    int ma_period = 2;                // dynamic stage-2 moving-average window
    std::optional<double> overhead_cap_pct; // user margin applied before path checks

    void validate() const;
};

struct RuleEval {
    std::string rule;
    double threshold = 0.0;
    double value = 0.0;
    bool pass = false;
};

struct CandidateReport {
    std::string name;
    OverheadRecord overhead;
    double coverage_pct = 0.0;
    std::size_t covered_nodes = 0;
    std::size_t total_nodes = 0;
    std::vector<RuleEval> rules;
    bool selected = false;
    std::string exclusion_reason; // empty iff selected; one primary reason
};

/// One step of the dynamic strategy's cumulative walk.
struct CumulativePoint {
    std::string name;
    double coverage_pct = 0.0; // set coverage after adding this candidate
    double delta = 0.0;        // marginal gain
    std::optional<double> ma;  // mean of the previous `ma_period` gains
    bool selected = false;
};

struct SelectionReport {
    StrategyConfig config;
    std::string overhead_source; // model_proxy | reports_csv | precomputed
    std::vector<CandidateReport> candidates;
    std::vector<std::string> ordering;         // dynamic stage-2 order
    std::vector<CumulativePoint> cumulative;   // dynamic only
    std::vector<std::string> final_list;
    std::vector<std::string> warnings;
};

/// Keep a candidate iff coverage_pct >= fixed_ratio * max_overhead_pct.
/// Both sides of every inequality are recorded.
SelectionReport fixed_threshold(const std::vector<Candidate>& candidates,
                                const StrategyConfig& cfg);

/// Population-relative selection. Stage 1 drops candidates whose maximum
/// overhead exceeds multiplier * mean(max overhead over all candidates).
/// Stage 2 orders survivors by descending individual coverage (name
/// tie-break), walks the cumulative set-coverage series and selects a
/// candidate when its marginal gain beats the moving average of the
/// preceding gains (window truncated to available history). The
/// top-coverage candidate is always selected. Needs >= 3 candidates.
SelectionReport dynamic_threshold(const std::vector<Candidate>& candidates,
                                  const StrategyConfig& cfg);

// --- full flow ---------------------------------------------------------------

struct FlowOptions {
    StrategyConfig strategy;
    BatchOptions path;
    unsigned seed = 1; // reference stimulus for the proxy cost model
    /// overhead reports by assertion name; empty -> proxy cost model
    std::map<std::string, OverheadRecord> overhead_reports;
    bool use_reports = false;
};

/// Audit data for one candidate as it moves through the flow.
struct FlowCandidate {
    std::string name;
    std::string status; // evaluated | excluded
    std::string detail; // exclusion reason or error text
    std::size_t monitor_cells = 0;
    std::size_t monitor_dffs = 0;
    std::map<NetId, PathVerdict> verdicts; // empty when never path-checked
};

struct FlowResult {
    SelectionReport report;
    std::vector<Candidate> evaluated;
    std::vector<FlowCandidate> audit;
};

/// The end-to-end loop: per candidate compile -> bind -> overhead ->
/// user-margin gate -> batch path check -> coverage; then the configured
/// strategy. Per-candidate failures become machine-readable exclusions and
/// the run continues.
FlowResult run_flow(const Netlist& design, const AssertionFile& assertions,
                    const FlowOptions& opts);

/// Precomputed-candidate input: {"universe": [names...], "candidates":
/// [{"name", "area_pct", "power_pct", "timing_pct", "covered": [names...]}]}.
std::vector<Candidate> candidates_from_json(std::string_view json_text);

// --- emission ----------------------------------------------------------------

std::string selection_report_json(const SelectionReport& r, const std::string& manifest_hash);
std::string selection_report_table(const SelectionReport& r);

/// Per-candidate overhead bars (area/power/timing).
std::string plot_overheads_svg(const SelectionReport& r);
/// Covered-node counts per candidate.
std::string plot_covered_svg(const SelectionReport& r);
/// Cumulative set-coverage walk with its moving-average trend line
/// (dynamic strategy only; empty string otherwise).
std::string plot_cumulative_svg(const SelectionReport& r);

} // namespace secov
