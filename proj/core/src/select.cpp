#include "secov/select.hpp"

#include "secov/report.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

namespace secov {

void StrategyConfig::validate() const {
    if (fixed_ratio <= 0) throw Error("fixed_ratio must be positive");
    if (overhead_multiplier <= 0) throw Error("overhead_multiplier must be positive");
    if (ma_period < 1) throw Error("ma_period must be >= 1");
    if (overhead_cap_pct && *overhead_cap_pct < 0)
        throw Error("overhead_cap_pct must be nonnegative");
}

namespace {

CandidateReport base_report(const Candidate& c) {
    CandidateReport r;
    r.name = c.name;
    r.overhead = c.overhead;
    r.coverage_pct = c.coverage.coverage_pct;
    r.covered_nodes = c.coverage.covered_nodes;
    r.total_nodes = c.coverage.total_nodes;
    return r;
}

} // namespace

SelectionReport fixed_threshold(const std::vector<Candidate>& candidates,
                                const StrategyConfig& cfg) {
    cfg.validate();
    SelectionReport out;
    out.config = cfg;
    if (candidates.empty()) {
        out.warnings.push_back("empty candidate list");
        return out;
    }
    for (const auto& c : candidates) {
        CandidateReport r = base_report(c);
        double required = cfg.fixed_ratio * c.overhead.max_overhead_pct;
        bool pass = c.coverage.coverage_pct >= required;
        r.rules.push_back(RuleEval{"fixed_threshold", required, c.coverage.coverage_pct, pass});
        r.selected = pass;
        if (!pass) r.exclusion_reason = "fixed_threshold";
        if (pass) out.final_list.push_back(c.name);
        out.candidates.push_back(std::move(r));
    }
    return out;
}

SelectionReport dynamic_threshold(const std::vector<Candidate>& candidates,
                                  const StrategyConfig& cfg) {
    cfg.validate();
    if (candidates.size() < 3)
        throw Error("dynamic strategy needs at least 3 candidates; use the fixed-threshold "
                    "strategy for small candidate lists");
    SelectionReport out;
    out.config = cfg;

    // stage 1: population-relative overhead cap
    double mean_ovh = 0.0;
    for (const auto& c : candidates) mean_ovh += c.overhead.max_overhead_pct;
    mean_ovh /= static_cast<double>(candidates.size());
    double cap = cfg.overhead_multiplier * mean_ovh;

    std::map<std::string, CandidateReport> reports;
    std::vector<const Candidate*> survivors;
    for (const auto& c : candidates) {
        CandidateReport r = base_report(c);
        bool pass = c.overhead.max_overhead_pct <= cap;
        r.rules.push_back(
            RuleEval{"dynamic_overhead_cap", cap, c.overhead.max_overhead_pct, pass});
        if (pass) {
            survivors.push_back(&c);
        } else {
            r.selected = false;
            r.exclusion_reason = "overhead_above_dynamic_cap";
        }
        reports.emplace(c.name, std::move(r));
    }

    // stage 2: cumulative set-coverage walk in descending coverage order
    std::sort(survivors.begin(), survivors.end(), [](const Candidate* a, const Candidate* b) {
        if (a->coverage.coverage_pct != b->coverage.coverage_pct)
            return a->coverage.coverage_pct > b->coverage.coverage_pct;
        return a->name < b->name;
    });
    for (const auto* c : survivors) out.ordering.push_back(c->name);

    std::vector<CoverageResult> prefix;
    std::vector<double> deltas;
    double prev_pct = 0.0;
    for (std::size_t i = 0; i < survivors.size(); ++i) {
        const Candidate& c = *survivors[i];
        prefix.push_back(c.coverage);
        CoverageResult cum = set_coverage(prefix, "prefix");
        double delta = cum.coverage_pct - prev_pct;
        prev_pct = cum.coverage_pct;

        CumulativePoint pt;
        pt.name = c.name;
        pt.coverage_pct = cum.coverage_pct;
        pt.delta = delta;
        CandidateReport& r = reports.at(c.name);
        bool selected;
        if (i == 0) {
            // the highest-coverage candidate anchors the set
            selected = true;
            r.rules.push_back(RuleEval{"top_coverage", 0.0, c.coverage.coverage_pct, true});
        } else {
            int window = std::min<int>(cfg.ma_period, static_cast<int>(deltas.size()));
            double ma = 0.0;
            for (int k = 0; k < window; ++k) ma += deltas[deltas.size() - 1 - k];
            ma /= window;
            pt.ma = ma;
            selected = delta > ma;
            r.rules.push_back(RuleEval{"marginal_gain", ma, delta, selected});
        }
        deltas.push_back(delta);
        pt.selected = selected;
        r.selected = selected;
        if (!selected) r.exclusion_reason = "no_positive_impact";
        out.cumulative.push_back(std::move(pt));
        if (selected) out.final_list.push_back(c.name);
    }

    for (const auto& c : candidates) out.candidates.push_back(reports.at(c.name));
    return out;
}

// --- flow ---------------------------------------------------------------------

FlowResult run_flow(const Netlist& design, const AssertionFile& assertions,
                    const FlowOptions& opts) {
    opts.strategy.validate();
    FlowResult res;
    res.report.config = opts.strategy;
    res.report.overhead_source = opts.use_reports ? "reports_csv" : "model_proxy";
    if (assertions.assertions.empty()) {
        res.report.warnings.push_back("empty candidate list");
        return res;
    }

    std::vector<CandidateReport> excluded;

    for (const auto& spec : assertions.assertions) {
        FlowCandidate audit;
        audit.name = spec.name;
        try {
            AssertionAst ast = parse_assertion(spec, assertions.constants);
            MonitorCircuit monitor = compile_to_monitor(ast, resolve_widths(ast, design));
            audit.monitor_cells = monitor.cell_count();
            audit.monitor_dffs = monitor.dff_count();
            Netlist merged = bind(design, monitor);

            OverheadRecord overhead;
            if (opts.use_reports) {
                auto it = opts.overhead_reports.find(spec.name);
                if (it == opts.overhead_reports.end()) {
                    audit.status = "excluded";
                    audit.detail = "overhead_missing";
                    CandidateReport r;
                    r.name = spec.name;
                    r.exclusion_reason = "overhead_missing";
                    excluded.push_back(std::move(r));
                    res.audit.push_back(std::move(audit));
                    continue;
                }
                overhead = it->second;
            } else {
                overhead = model_overhead(design, monitor, opts.seed);
            }

            // user margin gate: too costly candidates are never path-checked
            if (opts.strategy.overhead_cap_pct &&
                overhead.max_overhead_pct > *opts.strategy.overhead_cap_pct) {
                audit.status = "excluded";
                audit.detail = "overhead_cap";
                CandidateReport r;
                r.name = spec.name;
                r.overhead = overhead;
                r.rules.push_back(RuleEval{"overhead_cap", *opts.strategy.overhead_cap_pct,
                                           overhead.max_overhead_pct, false});
                r.exclusion_reason = "overhead_cap";
                excluded.push_back(std::move(r));
                res.audit.push_back(std::move(audit));
                continue;
            }

            NetId fail = *merged.find_net(spec.name + ".fail");
            std::vector<NetId> merged_nodes = list_nodes(merged);
            auto verdicts = batch_check(merged, fail, merged_nodes, opts.path);
            CoverageResult cov = security_coverage(spec.name, verdicts, merged_nodes, merged);

            audit.status = "evaluated";
            audit.verdicts = std::move(verdicts);
            res.evaluated.push_back(Candidate{spec.name, overhead, std::move(cov)});
        } catch (const Error& e) {
            audit.status = "excluded";
            audit.detail = e.what();
            CandidateReport r;
            r.name = spec.name;
            r.exclusion_reason = "bind_error";
            excluded.push_back(std::move(r));
        }
        res.audit.push_back(std::move(audit));
    }

    SelectionReport strat;
    if (res.evaluated.empty()) {
        strat.config = opts.strategy;
        strat.warnings.push_back("no candidate survived evaluation");
    } else if (opts.strategy.kind == StrategyKind::FixedThreshold) {
        strat = fixed_threshold(res.evaluated, opts.strategy);
    } else {
        strat = dynamic_threshold(res.evaluated, opts.strategy);
    }
    strat.overhead_source = res.report.overhead_source;
    for (auto& w : res.report.warnings) strat.warnings.push_back(w);
    for (auto& r : excluded) strat.candidates.push_back(std::move(r));
    res.report = std::move(strat);
    return res;
}

std::vector<Candidate> candidates_from_json(std::string_view json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed candidates JSON: ") + e.what());
    }
    if (!j.contains("universe") || !j.contains("candidates"))
        throw Error("candidates JSON needs 'universe' and 'candidates'");
    std::vector<std::string> universe = j["universe"].get<std::vector<std::string>>();
    std::vector<std::string> sorted_universe = universe;
    std::sort(sorted_universe.begin(), sorted_universe.end());
    std::string blob;
    for (const auto& s : sorted_universe) blob += s + "\n";
    std::uint64_t uni_hash = fnv1a(blob);

    std::vector<Candidate> out;
    for (const auto& e : j["candidates"]) {
        Candidate c;
        c.name = e.at("name").get<std::string>();
        c.overhead = OverheadRecord::from_pcts(c.name, e.at("area_pct").get<double>(),
                                               e.at("power_pct").get<double>(),
                                               e.at("timing_pct").get<double>());
        CoverageResult cov;
        cov.subject = c.name;
        cov.total_nodes = universe.size();
        cov.covered_set = e.at("covered").get<std::vector<std::string>>();
        std::sort(cov.covered_set.begin(), cov.covered_set.end());
        for (const auto& node : cov.covered_set)
            if (!std::binary_search(sorted_universe.begin(), sorted_universe.end(), node))
                throw Error("candidate '" + c.name + "' covers unknown node '" + node + "'");
        cov.covered_nodes = cov.covered_set.size();
        cov.coverage_pct = round2(100.0 * static_cast<double>(cov.covered_nodes) /
                                  static_cast<double>(cov.total_nodes));
        cov.universe_hash = uni_hash;
        c.coverage = std::move(cov);
        out.push_back(std::move(c));
    }
    return out;
}

// --- emission -------------------------------------------------------------------

namespace {

nlohmann::ordered_json config_json(const StrategyConfig& c) {
    nlohmann::ordered_json j;
    j["strategy"] = c.kind == StrategyKind::FixedThreshold ? "fixed" : "dynamic";
    j["fixed_ratio"] = c.fixed_ratio;
    j["overhead_multiplier"] = c.overhead_multiplier;
    j["ma_period"] = c.ma_period;
    if (c.overhead_cap_pct) j["overhead_cap_pct"] = *c.overhead_cap_pct;
    else j["overhead_cap_pct"] = nullptr;
    return j;
}

} // namespace

std::string selection_report_json(const SelectionReport& r, const std::string& manifest_hash) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["manifest_hash"] = manifest_hash;
    j["config"] = config_json(r.config);
    j["overhead_source"] = r.overhead_source;
    j["candidates"] = nlohmann::ordered_json::array();
    for (const auto& c : r.candidates) {
        nlohmann::ordered_json e;
        e["name"] = c.name;
        e["area_pct"] = round2(c.overhead.area_pct);
        e["power_pct"] = round2(c.overhead.power_pct);
        e["timing_pct"] = round2(c.overhead.timing_pct);
        e["max_overhead_pct"] = round2(c.overhead.max_overhead_pct);
        e["coverage_pct"] = c.coverage_pct;
        e["covered_nodes"] = c.covered_nodes;
        e["total_nodes"] = c.total_nodes;
        e["rules"] = nlohmann::ordered_json::array();
        for (const auto& rule : c.rules) {
            nlohmann::ordered_json re;
            re["rule"] = rule.rule;
            re["threshold"] = round2(rule.threshold);
            re["value"] = round2(rule.value);
            re["pass"] = rule.pass;
            e["rules"].push_back(re);
        }
        e["selected"] = c.selected;
        e["exclusion_reason"] =
            c.exclusion_reason.empty() ? nlohmann::ordered_json(nullptr)
                                       : nlohmann::ordered_json(c.exclusion_reason);
        j["candidates"].push_back(e);
    }
    j["ordering"] = r.ordering;
    j["cumulative"] = nlohmann::ordered_json::array();
    for (const auto& p : r.cumulative) {
        nlohmann::ordered_json e;
        e["name"] = p.name;
        e["coverage_pct"] = p.coverage_pct;
        e["delta"] = round2(p.delta);
        e["moving_average"] =
            p.ma ? nlohmann::ordered_json(round2(*p.ma)) : nlohmann::ordered_json(nullptr);
        e["selected"] = p.selected;
        j["cumulative"].push_back(e);
    }
    j["final"] = r.final_list;
    j["warnings"] = r.warnings;
    return j.dump(2) + "\n";
}

std::string selection_report_table(const SelectionReport& r) {
    std::ostringstream os;
    os << "candidate        area%   power%  timing%  max%    cov%    covered  verdict\n";
    os << "---------------- ------- ------- -------- ------- ------- -------- -----------------\n";
    for (const auto& c : r.candidates) {
        char line[160];
        std::snprintf(line, sizeof line, "%-16s %7.2f %7.2f %8.2f %7.2f %7.2f %8zu %s\n",
                      c.name.c_str(), c.overhead.area_pct, c.overhead.power_pct,
                      c.overhead.timing_pct, c.overhead.max_overhead_pct, c.coverage_pct,
                      c.covered_nodes,
                      c.selected ? "selected" : c.exclusion_reason.c_str());
        os << line;
    }
    os << "\nfinal list:";
    if (r.final_list.empty()) os << " (empty)";
    for (const auto& name : r.final_list) os << " " << name;
    os << "\n";
    for (const auto& w : r.warnings) os << "warning: " << w << "\n";
    return os.str();
}

std::string plot_overheads_svg(const SelectionReport& r) {
    std::vector<std::string> labels;
    SvgSeries area{"area %", {}, "#4878cf"};
    SvgSeries power{"power %", {}, "#d65f5f"};
    SvgSeries timing{"timing %", {}, "#6acc65"};
    for (const auto& c : r.candidates) {
        labels.push_back(c.name);
        area.values.push_back(std::max(0.0, c.overhead.area_pct));
        power.values.push_back(std::max(0.0, c.overhead.power_pct));
        timing.values.push_back(std::max(0.0, c.overhead.timing_pct));
    }
    return svg_bar_chart("Per-candidate performance overheads", labels,
                         {area, power, timing}, "overhead (%)");
}

std::string plot_covered_svg(const SelectionReport& r) {
    std::vector<std::string> labels;
    SvgSeries covered{"covered nodes", {}, "#4878cf"};
    for (const auto& c : r.candidates) {
        labels.push_back(c.name);
        covered.values.push_back(static_cast<double>(c.covered_nodes));
    }
    return svg_bar_chart("Covered nodes per candidate", labels, {covered}, "nodes");
}

std::string plot_cumulative_svg(const SelectionReport& r) {
    if (r.cumulative.empty()) return "";
    std::vector<std::string> labels;
    SvgSeries line{"cumulative set coverage %", {}, "#4878cf"};
    SvgSeries ma{"moving average of the series", {}, "#d65f5f"};
    std::vector<double> series;
    for (const auto& p : r.cumulative) {
        labels.push_back(p.name);
        line.values.push_back(p.coverage_pct);
        series.push_back(p.coverage_pct);
    }
    // lagging moving average of the plotted series itself
    int period = std::max(1, r.config.ma_period);
    for (std::size_t i = 0; i < series.size(); ++i) {
        int window = std::min<int>(period, static_cast<int>(i) + 1);
        double sum = 0;
        for (int k = 0; k < window; ++k) sum += series[i - k];
        ma.values.push_back(sum / window);
    }
    return svg_line_chart("Set coverage as candidates are added", labels, line, ma,
                          "coverage (%)");
}

} // namespace secov
