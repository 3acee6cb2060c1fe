#include "secov/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>

namespace secov {

double round2(double x) { return std::round(x * 100.0) / 100.0; }

namespace {

std::uint64_t fnv1a_names(const std::vector<std::string>& sorted_names) {
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& s : sorted_names) {
        for (char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
        h ^= 0xff;
        h *= 1099511628211ull;
    }
    return h;
}

std::string pct_str(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

} // namespace

CoverageResult coverage_from_counts(const std::string& subject, std::size_t covered,
                                    std::size_t total) {
    if (total == 0) throw Error("empty node universe");
    if (covered > total) throw Error("covered count exceeds total");
    CoverageResult r;
    r.subject = subject;
    r.total_nodes = total;
    r.covered_nodes = covered;
    r.coverage_pct = round2(100.0 * static_cast<double>(covered) / static_cast<double>(total));
    r.universe_hash = total; // counts-only results share a universe by size
    return r;
}

CoverageResult security_coverage(const std::string& subject,
                                 const std::map<NetId, PathVerdict>& verdicts,
                                 const std::vector<NetId>& nodes, const Netlist& n) {
    if (nodes.empty()) throw Error("empty node universe");
    CoverageResult r;
    r.subject = subject;
    r.total_nodes = nodes.size();
    std::vector<std::string> universe;
    universe.reserve(nodes.size());
    for (NetId id : nodes) {
        auto it = verdicts.find(id);
        if (it == verdicts.end())
            throw Error("verdict missing for node '" + n.net_name(id) + "'");
        universe.push_back(n.net_name(id));
        if (it->second.status == PathStatus::Reachable) r.covered_set.push_back(n.net_name(id));
    }
    std::sort(universe.begin(), universe.end());
    std::sort(r.covered_set.begin(), r.covered_set.end());
    r.covered_nodes = r.covered_set.size();
    r.coverage_pct =
        round2(100.0 * static_cast<double>(r.covered_nodes) / static_cast<double>(r.total_nodes));
    r.universe_hash = fnv1a_names(universe);
    return r;
}

CoverageResult set_coverage(const std::vector<CoverageResult>& results,
                            const std::string& subject) {
    if (results.empty()) throw Error("set_coverage needs at least one member");
    const CoverageResult& first = results.front();
    std::set<std::string> uni;
    for (const auto& r : results) {
        if (r.universe_hash != first.universe_hash || r.total_nodes != first.total_nodes)
            throw Error("mismatched node universes in set_coverage");
        if (r.covered_set.size() != r.covered_nodes)
            throw Error("set_coverage needs node-level detail (counts-only result '" +
                        r.subject + "')");
        uni.insert(r.covered_set.begin(), r.covered_set.end());
    }
    CoverageResult out;
    out.subject = subject;
    out.total_nodes = first.total_nodes;
    out.universe_hash = first.universe_hash;
    out.covered_set.assign(uni.begin(), uni.end());
    out.covered_nodes = out.covered_set.size();
    out.coverage_pct = round2(100.0 * static_cast<double>(out.covered_nodes) /
                              static_cast<double>(out.total_nodes));
    return out;
}

OverheadRecord OverheadRecord::from_pcts(std::string name, double area, double power,
                                         double timing) {
    OverheadRecord r;
    r.name = std::move(name);
    r.area_pct = area;
    r.power_pct = power;
    r.timing_pct = timing;
    r.max_overhead_pct = std::max({0.0, area, power, timing});
    return r;
}

OverheadRecord overhead_from_reports(const SynthesisRecord& baseline,
                                     const SynthesisRecord& with_assertion) {
    auto delta = [&](double base, double with, const char* what) {
        if (base <= 0.0)
            throw Error(std::string("nonpositive baseline ") + what + " value");
        return 100.0 * (with - base) / base;
    };
    return OverheadRecord::from_pcts(with_assertion.name,
                                     delta(baseline.area, with_assertion.area, "area"),
                                     delta(baseline.power, with_assertion.power, "power"),
                                     delta(baseline.timing, with_assertion.timing, "timing"));
}

std::vector<OverheadRecord> overheads_from_csv(std::string_view csv) {
    std::istringstream in{std::string(csv)};
    std::string line;
    std::optional<SynthesisRecord> baseline;
    std::vector<SynthesisRecord> rows;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string name, a, p, t;
        if (!std::getline(ls, name, ',') || !std::getline(ls, a, ',') ||
            !std::getline(ls, p, ',') || !std::getline(ls, t, ','))
            throw ParseError("expected name,area,power,timing", line_no, 1);
        if (name == "name" && a == "area") continue; // header
        SynthesisRecord rec;
        rec.name = name;
        try {
            rec.area = std::stod(a);
            rec.power = std::stod(p);
            rec.timing = std::stod(t);
        } catch (const std::exception&) {
            throw ParseError("malformed number in overhead row '" + name + "'", line_no, 1);
        }
        if (rec.name == "BASELINE") {
            if (baseline) throw ParseError("duplicate BASELINE row", line_no, 1);
            baseline = rec;
        } else {
            rows.push_back(rec);
        }
    }
    if (!baseline) throw Error("overhead CSV needs one BASELINE row");
    std::vector<OverheadRecord> out;
    for (const auto& rec : rows) out.push_back(overhead_from_reports(*baseline, rec));
    return out;
}

// --- proxy cost model ------------------------------------------------------

double CostWeights::weight(CellKind k) const {
    auto it = override_weights.find(k);
    if (it != override_weights.end()) return it->second;
    if (k == CellKind::CONST0 || k == CellKind::CONST1) return 0.0;
    return 1.0;
}

namespace {

double weighted_cells(const Netlist& n, const CostWeights& w,
                      std::optional<NetOrigin> only_origin) {
    double sum = 0.0;
    for (const auto& c : n.cells()) {
        if (only_origin && n.net(c.output).origin != *only_origin) continue;
        sum += w.weight(c.kind);
    }
    return sum;
}

int logic_depth(const Netlist& n) {
    std::vector<int> level(n.nets().size(), 0);
    int deepest = 0;
    for (CellId ci : n.topo_order()) {
        const Cell& c = n.cell(ci);
        int lv = 0;
        for (NetId in : c.inputs) lv = std::max(lv, level[in]);
        level[c.output] = lv + 1;
        deepest = std::max(deepest, level[c.output]);
    }
    return deepest;
}

Stimulus reference_stimulus(const Netlist& n, int cycles, unsigned seed) {
    std::mt19937 rng(seed);
    Stimulus st;
    for (NetId pi : n.primary_inputs()) {
        if (n.clock() && *n.clock() == pi) continue;
        st.signals.push_back(n.net_name(pi));
    }
    std::sort(st.signals.begin(), st.signals.end());
    for (int t = 0; t < cycles; ++t) {
        std::vector<std::uint8_t> row;
        for (std::size_t i = 0; i < st.signals.size(); ++i)
            row.push_back(static_cast<std::uint8_t>(rng() % 2));
        st.values.push_back(std::move(row));
    }
    return st;
}

double weighted_toggles(const Netlist& n, const Trace& tr, const CostWeights& w,
                        std::optional<NetOrigin> only_origin) {
    double sum = 0.0;
    for (const auto& c : n.cells()) {
        if (only_origin && n.net(c.output).origin != *only_origin) continue;
        double weight = w.weight(c.kind);
        if (weight == 0.0) continue;
        int toggles = 0;
        for (std::size_t t = 1; t < tr.cycle_count(); ++t)
            if (tr.at(t, c.output) != tr.at(t - 1, c.output)) ++toggles;
        sum += weight * toggles;
    }
    return sum;
}

} // namespace

OverheadRecord model_overhead(const Netlist& design, const MonitorCircuit& monitor,
                              unsigned seed, const CostWeights& weights) {
    Netlist merged = bind(design, monitor);

    double base_area = weighted_cells(design, weights, std::nullopt);
    double mon_area = weighted_cells(merged, weights, NetOrigin::Monitor);
    double area_pct = base_area > 0 ? 100.0 * mon_area / base_area : 0.0;

    int base_depth = logic_depth(design);
    int merged_depth = logic_depth(merged);
    double timing_pct =
        100.0 * static_cast<double>(merged_depth - base_depth) / std::max(1, base_depth);

    Stimulus st = reference_stimulus(merged, 64, seed);
    Trace tr = simulate(merged, st);
    double base_power = weighted_toggles(merged, tr, weights, NetOrigin::Design);
    double mon_power = weighted_toggles(merged, tr, weights, NetOrigin::Monitor);
    double power_pct = base_power > 0 ? 100.0 * mon_power / base_power : 0.0;

    return OverheadRecord::from_pcts(monitor.name, area_pct, power_pct, timing_pct);
}

// --- emission ---------------------------------------------------------------

std::string coverage_csv(const std::vector<CoverageResult>& rows) {
    std::string out = "subject,total,covered,pct\n";
    for (const auto& r : rows) {
        out += r.subject + "," + std::to_string(r.total_nodes) + "," +
               std::to_string(r.covered_nodes) + "," + pct_str(r.coverage_pct) + "\n";
    }
    return out;
}

std::string verdict_csv(const Netlist& n, const std::map<NetId, PathVerdict>& verdicts,
                        bool with_timings) {
    std::string out = "origin,status,bound,solve_ms\n";
    std::vector<std::pair<std::string, const PathVerdict*>> rows;
    for (const auto& [id, v] : verdicts) rows.emplace_back(n.net_name(id), &v);
    std::sort(rows.begin(), rows.end());
    char buf[64];
    for (const auto& [name, v] : rows) {
        std::snprintf(buf, sizeof buf, "%.3f", with_timings ? v->stats.solve_ms : 0.0);
        out += name + "," + path_status_name(v->status) + "," +
               std::to_string(v->stats.bound) + "," + buf + "\n";
    }
    return out;
}

} // namespace secov
