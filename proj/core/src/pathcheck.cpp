#include "secov/pathcheck.hpp"

#include "secov/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <deque>
#include <set>
#include <thread>
#include <unordered_map>

namespace secov {

const char* path_status_name(PathStatus s) {
    switch (s) {
        case PathStatus::Reachable: return "reachable";
        case PathStatus::UnreachableStructural: return "unreachable_structural";
        case PathStatus::UnreachableAtBound: return "unreachable_at_bound";
        case PathStatus::Unknown: return "unknown";
    }
    return "unknown";
}

namespace {

// 0-1 BFS over the cell graph. Weight 1 for crossing a DFF through its data
// pin, 0 otherwise; the DFF clock pin carries no edge. With reverse=true the
// search runs destination-to-origins.
std::vector<std::optional<int>> dff_distance(const Netlist& n, NetId source, bool reverse) {
    std::vector<std::optional<int>> dist(n.nets().size());
    std::deque<NetId> dq;
    dist[source] = 0;
    dq.push_back(source);
    while (!dq.empty()) {
        NetId u = dq.front();
        dq.pop_front();
        int du = *dist[u];
        if (!reverse) {
            for (CellId ci : n.readers(u)) {
                const Cell& c = n.cell(ci);
                for (std::size_t pin = 0; pin < c.inputs.size(); ++pin) {
                    if (c.inputs[pin] != u) continue;
                    int w;
                    if (c.kind == CellKind::DFF) {
                        if (pin == 1) continue; // clock
                        w = pin == 0 ? 1 : 0;   // data delays, reset is immediate
                    } else {
                        w = 0;
                    }
                    int nd = du + w;
                    if (!dist[c.output] || *dist[c.output] > nd) {
                        dist[c.output] = nd;
                        if (w == 0) dq.push_front(c.output);
                        else dq.push_back(c.output);
                    }
                }
            }
        } else {
            auto dc = n.driver(u);
            if (!dc) continue;
            const Cell& c = n.cell(*dc);
            for (std::size_t pin = 0; pin < c.inputs.size(); ++pin) {
                int w;
                if (c.kind == CellKind::DFF) {
                    if (pin == 1) continue;
                    w = pin == 0 ? 1 : 0;
                } else {
                    w = 0;
                }
                NetId from = c.inputs[pin];
                int nd = du + w;
                if (!dist[from] || *dist[from] > nd) {
                    dist[from] = nd;
                    if (w == 0) dq.push_front(from);
                    else dq.push_back(from);
                }
            }
        }
    }
    return dist;
}

int resolve_bound(const PathQuery& q, int seq_dist, int cap) {
    if (q.bound) {
        if (*q.bound < 1) throw Error("path bound must be >= 1");
        return *q.bound;
    }
    return std::max(1, std::min(seq_dist + 2, cap));
}

// Fanout cone of the origin (nets whose value can depend on it), DFF data
// and reset edges included. The faulty circuit copy is restricted to this.
std::vector<bool> fanout_cone(const Netlist& n, NetId origin) {
    std::vector<bool> cone(n.nets().size(), false);
    std::deque<NetId> dq{origin};
    cone[origin] = true;
    while (!dq.empty()) {
        NetId u = dq.front();
        dq.pop_front();
        for (CellId ci : n.readers(u)) {
            const Cell& c = n.cell(ci);
            bool feeds = false;
            for (std::size_t pin = 0; pin < c.inputs.size(); ++pin) {
                if (c.inputs[pin] != u) continue;
                if (c.kind == CellKind::DFF && pin == 1) continue;
                feeds = true;
            }
            if (feeds && !cone[c.output]) {
                cone[c.output] = true;
                dq.push_back(c.output);
            }
        }
    }
    return cone;
}

// --- CNF encoding --------------------------------------------------------

// Encoded value: a solver literal, or a folded constant.
using Enc = std::int64_t;
constexpr Enc kTrue = -1;
constexpr Enc kFalse = -2;

inline bool is_const(Enc e) { return e < 0; }
inline Enc enc_neg(Enc e) {
    if (e == kTrue) return kFalse;
    if (e == kFalse) return kTrue;
    return e ^ 1;
}

/// Unrolls two copies of the circuit lazily from the destination cone.
/// Copy B (faulty) aliases copy A outside the origin's fanout cone and
/// takes the complemented origin value at the flip cycle. Gate encodings
/// fold constants, so CONST cells and values pinned by reset propagate
/// without clauses.
class SensitizeEncoder {
  public:
    SensitizeEncoder(const Netlist& n, NetId origin, int flip_cycle,
                     const std::vector<bool>& cone)
        : nl_(n), origin_(origin), flip_(flip_cycle), cone_(cone) {}

    Solver& solver() { return solver_; }

    Enc net_at(NetId net, int cycle, bool faulty) {
        if (faulty && !cone_[net]) return net_at(net, cycle, false);
        if (faulty && net == origin_ && cycle == flip_) return enc_neg(golden_origin(cycle));
        if (faulty && !nl_.driver(net)) return net_at(net, cycle, false); // shared inputs
        std::uint64_t key = pack(net, cycle, faulty, false);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        Enc e = compute_net(net, cycle, faulty);
        memo_.emplace(key, e);
        return e;
    }

    // Model value of a primary input at a cycle; inputs never touched by the
    // encoding are unconstrained and read as 0.
    bool input_value(NetId pi, int cycle) const {
        auto it = memo_.find(pack(pi, cycle, false, false));
        if (it == memo_.end()) return false;
        Enc e = it->second;
        if (is_const(e)) return e == kTrue;
        Lit l = static_cast<Lit>(e);
        bool v = solver_.model_value(lit_var(l));
        return lit_sign(l) ? !v : v;
    }

    Enc enc_and(Enc a, Enc b) {
        if (a == kFalse || b == kFalse) return kFalse;
        if (a == kTrue) return b;
        if (b == kTrue) return a;
        if (a == b) return a;
        if (a == enc_neg(b)) return kFalse;
        Lit y = mk_lit(solver_.new_var());
        Lit la = static_cast<Lit>(a), lb = static_cast<Lit>(b);
        solver_.add_clause({lit_neg(y), la});
        solver_.add_clause({lit_neg(y), lb});
        solver_.add_clause({y, lit_neg(la), lit_neg(lb)});
        return y;
    }

    Enc enc_or(Enc a, Enc b) { return enc_neg(enc_and(enc_neg(a), enc_neg(b))); }

    Enc enc_xor(Enc a, Enc b) {
        if (a == kFalse) return b;
        if (b == kFalse) return a;
        if (a == kTrue) return enc_neg(b);
        if (b == kTrue) return enc_neg(a);
        if (a == b) return kFalse;
        if (a == enc_neg(b)) return kTrue;
        Lit y = mk_lit(solver_.new_var());
        Lit la = static_cast<Lit>(a), lb = static_cast<Lit>(b);
        solver_.add_clause({lit_neg(y), la, lb});
        solver_.add_clause({lit_neg(y), lit_neg(la), lit_neg(lb)});
        solver_.add_clause({y, lit_neg(la), lb});
        solver_.add_clause({y, la, lit_neg(lb)});
        return y;
    }

    // y = s ? b : a
    Enc enc_mux(Enc s, Enc a, Enc b) {
        if (s == kFalse) return a;
        if (s == kTrue) return b;
        if (a == b) return a;
        if (a == kFalse && b == kTrue) return s;
        if (a == kTrue && b == kFalse) return enc_neg(s);
        Lit y = mk_lit(solver_.new_var());
        Lit ls = static_cast<Lit>(s);
        if (is_const(a)) {
            // s=0 branch constant
            Lit lb = static_cast<Lit>(b);
            if (a == kTrue) solver_.add_clause({y, ls});
            else solver_.add_clause({lit_neg(y), ls});
            solver_.add_clause({lit_neg(ls), lit_neg(lb), y});
            solver_.add_clause({lit_neg(ls), lb, lit_neg(y)});
            return y;
        }
        if (is_const(b)) {
            Lit la = static_cast<Lit>(a);
            if (b == kTrue) solver_.add_clause({y, lit_neg(ls)});
            else solver_.add_clause({lit_neg(y), lit_neg(ls)});
            solver_.add_clause({ls, lit_neg(la), y});
            solver_.add_clause({ls, la, lit_neg(y)});
            return y;
        }
        Lit la = static_cast<Lit>(a), lb = static_cast<Lit>(b);
        solver_.add_clause({lit_neg(ls), lit_neg(lb), y});
        solver_.add_clause({lit_neg(ls), lb, lit_neg(y)});
        solver_.add_clause({ls, lit_neg(la), y});
        solver_.add_clause({ls, la, lit_neg(y)});
        solver_.add_clause({lit_neg(la), lit_neg(lb), y});
        solver_.add_clause({la, lb, lit_neg(y)});
        return y;
    }

  private:
    static std::uint64_t pack(NetId net, int cycle, bool faulty, bool state) {
        return (static_cast<std::uint64_t>(net) << 16) |
               (static_cast<std::uint64_t>(cycle & 0x3fff) << 2) |
               (faulty ? 2u : 0u) | (state ? 1u : 0u);
    }

    Enc golden_origin(int cycle) { return net_at(origin_, cycle, false); }

    Enc compute_net(NetId net, int cycle, bool faulty) {
        if (nl_.clock() && *nl_.clock() == net) return kFalse;
        auto dc = nl_.driver(net);
        if (!dc) {
            // primary input: one shared variable per cycle
            Enc e = mk_lit(solver_.new_var());
            return e;
        }
        const Cell& c = nl_.cell(*dc);
        switch (c.kind) {
            case CellKind::CONST0: return kFalse;
            case CellKind::CONST1: return kTrue;
            case CellKind::DFF: {
                Enc st = dff_state(*dc, cycle, faulty);
                if (c.inputs.size() == 3) {
                    Enc rstn = net_at(c.inputs[2], cycle, faulty);
                    Enc rv = c.reset_value ? kTrue : kFalse;
                    return enc_mux(rstn, rv, st);
                }
                return st;
            }
            default: break;
        }
        Enc a = net_at(c.inputs[0], cycle, faulty);
        switch (c.kind) {
            case CellKind::NOT: return enc_neg(a);
            case CellKind::BUF: return a;
            default: break;
        }
        Enc b = net_at(c.inputs[1], cycle, faulty);
        switch (c.kind) {
            case CellKind::AND: return enc_and(a, b);
            case CellKind::NAND: return enc_neg(enc_and(a, b));
            case CellKind::OR: return enc_or(a, b);
            case CellKind::NOR: return enc_neg(enc_or(a, b));
            case CellKind::XOR: return enc_xor(a, b);
            case CellKind::XNOR: return enc_neg(enc_xor(a, b));
            case CellKind::MUX2: return enc_mux(a, b, net_at(c.inputs[2], cycle, faulty));
            default: throw Error("unexpected cell kind in encoder");
        }
    }

    Enc dff_state(CellId ci, int cycle, bool faulty) {
        const Cell& c = nl_.cell(ci);
        if (cycle == 0) return c.reset_value ? kTrue : kFalse;
        std::uint64_t key = pack(c.output, cycle, faulty, true);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        Enc d = net_at(c.inputs[0], cycle - 1, faulty);
        Enc e;
        if (c.inputs.size() == 3) {
            Enc rstn = net_at(c.inputs[2], cycle - 1, faulty);
            Enc rv = c.reset_value ? kTrue : kFalse;
            e = enc_mux(rstn, rv, d);
        } else {
            e = d;
        }
        memo_.emplace(key, e);
        return e;
    }

    const Netlist& nl_;
    NetId origin_;
    int flip_;
    const std::vector<bool>& cone_;
    Solver solver_;
    std::unordered_map<std::uint64_t, Enc> memo_;
};

Witness extract_witness(const Netlist& n, SensitizeEncoder& enc, int flip, int bound) {
    Witness w;
    w.flip_cycle = flip;
    for (NetId pi : n.primary_inputs()) {
        if (n.clock() && *n.clock() == pi) continue;
        w.stimulus.signals.push_back(n.net_name(pi));
    }
    std::sort(w.stimulus.signals.begin(), w.stimulus.signals.end());
    for (int t = 0; t < bound; ++t) {
        std::vector<std::uint8_t> row;
        for (const auto& name : w.stimulus.signals) {
            NetId pi = *n.find_net(name);
            row.push_back(enc.input_value(pi, t) ? 1 : 0);
        }
        w.stimulus.values.push_back(std::move(row));
    }
    return w;
}

// Confirms the witness through the simulator and fills diverge_cycle.
bool replay_witness(const Netlist& n, const PathQuery& q, Witness& w, int bound) {
    Trace golden = simulate(n, w.stimulus);
    Trace faulty = simulate(n, w.stimulus, Flip{q.origin, w.flip_cycle});
    for (int t = w.flip_cycle; t < bound; ++t) {
        if (golden.at(t, q.destination) != faulty.at(t, q.destination)) {
            w.diverge_cycle = t;
            return true;
        }
    }
    return false;
}

PathVerdict sensitize_with_dist(const Netlist& n, const PathQuery& q,
                                const SensitizeOptions& opts,
                                std::optional<int> seq_dist) {
    PathVerdict v;
    if (!seq_dist) {
        v.status = PathStatus::UnreachableStructural;
        return v;
    }
    int bound = resolve_bound(q, *seq_dist, opts.bound_cap);
    v.stats.bound = bound;
    auto t0 = std::chrono::steady_clock::now();

    std::vector<bool> cone = fanout_cone(n, q.origin);
    const bool has_budget = opts.budget_conflicts >= 0;
    std::int64_t remaining = opts.budget_conflicts;
    bool unknown = false;

    for (int flip = 0; flip < bound; ++flip) {
        // A flip needs at least seq_dist cycle boundaries to show up.
        if (flip + *seq_dist > bound - 1) break;
        SensitizeEncoder enc(n, q.origin, flip, cone);
        std::vector<Lit> miter;
        bool trivially_sat = false;
        // Influence crosses at least seq_dist registers, one cycle each.
        for (int t = flip + *seq_dist; t < bound; ++t) {
            Enc a = enc.net_at(q.destination, t, false);
            Enc b = enc.net_at(q.destination, t, true);
            Enc d = enc.enc_xor(a, b);
            if (d == kTrue) { trivially_sat = true; break; }
            if (d == kFalse) continue;
            miter.push_back(static_cast<Lit>(d));
        }
        SolveResult r;
        if (trivially_sat) {
            r = SolveResult::Sat; // divergence holds under any assignment
        } else if (miter.empty()) {
            r = SolveResult::Unsat; // folded away: no divergence at this flip
        } else {
            if (has_budget && remaining <= 0) {
                unknown = true;
                break;
            }
            enc.solver().add_clause(miter);
            r = enc.solver().solve(has_budget ? remaining : -1);
            const auto& st = enc.solver().stats();
            v.stats.conflicts += st.conflicts;
            v.stats.decisions += st.decisions;
            v.stats.clauses += st.clauses + st.learned;
            v.stats.vars += static_cast<std::uint64_t>(enc.solver().num_vars());
            if (has_budget) remaining -= static_cast<std::int64_t>(st.conflicts);
        }
        if (r == SolveResult::Sat) {
            Witness w = extract_witness(n, enc, flip, bound);
            if (!replay_witness(n, q, w, bound))
                throw Error("internal: witness replay failed for origin '" +
                            n.net_name(q.origin) + "'");
            v.witness = std::move(w);
            v.status = PathStatus::Reachable;
            v.stats.solve_ms = std::chrono::duration<double, std::milli>(
                                   std::chrono::steady_clock::now() - t0)
                                   .count();
            return v;
        }
        if (r == SolveResult::Unknown) {
            unknown = true;
            break;
        }
    }
    v.status = unknown ? PathStatus::Unknown : PathStatus::UnreachableAtBound;
    v.stats.solve_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    return v;
}

} // namespace

bool structural_reach(const Netlist& n, NetId origin, NetId destination) {
    return sequential_distance(n, origin, destination).has_value();
}

std::optional<int> sequential_distance(const Netlist& n, NetId origin, NetId destination) {
    if (origin >= n.nets().size() || destination >= n.nets().size())
        throw Error("unknown net id in path query");
    auto dist = dff_distance(n, origin, /*reverse=*/false);
    return dist[destination];
}

PathVerdict sensitize(const Netlist& n, const PathQuery& q, const SensitizeOptions& opts) {
    return sensitize_with_dist(n, q, opts, sequential_distance(n, q.origin, q.destination));
}

// --- brute-force oracle ---------------------------------------------------

namespace {

/// Dense single-cycle evaluator for the oracle's state-space walk.
struct CompiledEval {
    explicit CompiledEval(const Netlist& n) : nl(n) {
        for (NetId pi : n.primary_inputs()) {
            if (n.clock() && *n.clock() == pi) continue;
            stim_inputs.push_back(pi);
        }
        std::sort(stim_inputs.begin(), stim_inputs.end(),
                  [&](NetId a, NetId b) { return n.net_name(a) < n.net_name(b); });
        vals.resize(n.nets().size(), 0);
    }

    // Returns the next state; fills vals with this cycle's net values.
    std::uint32_t step(std::uint32_t state, std::uint32_t inputs, NetId flip) {
        for (std::size_t i = 0; i < stim_inputs.size(); ++i)
            vals[stim_inputs[i]] = (inputs >> i) & 1;
        if (nl.clock()) vals[*nl.clock()] = 0;
        if (flip != kNoNet && nl.is_primary_input(flip)) vals[flip] ^= 1;
        const auto& dffs = nl.dff_cells();
        for (std::size_t i = 0; i < dffs.size(); ++i) {
            const Cell& c = nl.cell(dffs[i]);
            bool in_reset = c.inputs.size() == 3 && vals[c.inputs[2]] == 0;
            vals[c.output] = in_reset ? (c.reset_value ? 1 : 0) : ((state >> i) & 1);
            if (flip == c.output) vals[c.output] ^= 1;
        }
        for (CellId ci : nl.topo_order()) {
            const Cell& c = nl.cell(ci);
            const auto& in = c.inputs;
            std::uint8_t v = 0;
            switch (c.kind) {
                case CellKind::AND: v = vals[in[0]] & vals[in[1]]; break;
                case CellKind::OR: v = vals[in[0]] | vals[in[1]]; break;
                case CellKind::NAND: v = 1 ^ (vals[in[0]] & vals[in[1]]); break;
                case CellKind::NOR: v = 1 ^ (vals[in[0]] | vals[in[1]]); break;
                case CellKind::XOR: v = vals[in[0]] ^ vals[in[1]]; break;
                case CellKind::XNOR: v = 1 ^ (vals[in[0]] ^ vals[in[1]]); break;
                case CellKind::NOT: v = 1 ^ vals[in[0]]; break;
                case CellKind::BUF: v = vals[in[0]]; break;
                case CellKind::MUX2: v = vals[in[0]] ? vals[in[2]] : vals[in[1]]; break;
                case CellKind::CONST0: v = 0; break;
                case CellKind::CONST1: v = 1; break;
                case CellKind::DFF: continue;
            }
            vals[c.output] = v;
            if (flip == c.output) vals[c.output] ^= 1;
        }
        std::uint32_t next = 0;
        for (std::size_t i = 0; i < dffs.size(); ++i) {
            const Cell& c = nl.cell(dffs[i]);
            bool in_reset = c.inputs.size() == 3 && vals[c.inputs[2]] == 0;
            std::uint8_t bit = in_reset ? (c.reset_value ? 1 : 0) : vals[c.inputs[0]];
            next |= static_cast<std::uint32_t>(bit) << i;
        }
        return next;
    }

    std::uint32_t reset_state() const {
        std::uint32_t s = 0;
        const auto& dffs = nl.dff_cells();
        for (std::size_t i = 0; i < dffs.size(); ++i)
            if (nl.cell(dffs[i]).reset_value) s |= 1u << i;
        return s;
    }

    const Netlist& nl;
    std::vector<NetId> stim_inputs;
    std::vector<std::uint8_t> vals;
};

} // namespace

bool brute_force_reach(const Netlist& n, const PathQuery& q) {
    auto seq = sequential_distance(n, q.origin, q.destination);
    if (!seq) return false;
    int bound = resolve_bound(q, *seq, SensitizeOptions{}.bound_cap);

    CompiledEval ev(n);
    if (ev.stim_inputs.size() > 10 || n.dff_count() > 6 || bound > 5)
        throw Error("instance exceeds enumeration limits (<=10 inputs, <=6 DFFs, bound <=5)");

    const std::uint32_t n_inputs = 1u << ev.stim_inputs.size();
    NetId dest = q.destination;

    // Golden states reachable at each cycle.
    std::vector<std::set<std::uint32_t>> reach(bound);
    reach[0].insert(ev.reset_state());
    for (int t = 0; t + 1 < bound; ++t)
        for (std::uint32_t s : reach[t])
            for (std::uint32_t x = 0; x < n_inputs; ++x)
                reach[t + 1].insert(ev.step(s, x, kNoNet));

    // Diverged (golden, faulty) state pairs per cycle, merged over all flip
    // cycles; equal pairs can never diverge later and are dropped.
    std::vector<std::set<std::uint64_t>> pairs(bound + 1);
    for (int flip = 0; flip < bound; ++flip) {
        for (std::uint32_t s : reach[flip]) {
            for (std::uint32_t x = 0; x < n_inputs; ++x) {
                std::uint32_t sg = ev.step(s, x, kNoNet);
                std::uint8_t dg = ev.vals[dest];
                std::uint32_t sf = ev.step(s, x, q.origin);
                std::uint8_t df = ev.vals[dest];
                if (dg != df) return true; // divergence at the flip cycle
                if (sg != sf && flip + 1 < bound)
                    pairs[flip + 1].insert((static_cast<std::uint64_t>(sg) << 32) | sf);
            }
        }
    }
    for (int t = 1; t < bound; ++t) {
        for (std::uint64_t pr : pairs[t]) {
            auto sg0 = static_cast<std::uint32_t>(pr >> 32);
            auto sf0 = static_cast<std::uint32_t>(pr & 0xffffffffu);
            for (std::uint32_t x = 0; x < n_inputs; ++x) {
                std::uint32_t sg = ev.step(sg0, x, kNoNet);
                std::uint8_t dg = ev.vals[dest];
                std::uint32_t sf = ev.step(sf0, x, kNoNet);
                std::uint8_t df = ev.vals[dest];
                if (dg != df) return true;
                if (sg != sf && t + 1 < bound)
                    pairs[t + 1].insert((static_cast<std::uint64_t>(sg) << 32) | sf);
            }
        }
    }
    return false;
}

// --- batch ---------------------------------------------------------------

std::map<NetId, PathVerdict> batch_check(const Netlist& n, NetId destination,
                                         const std::vector<NetId>& origins,
                                         const BatchOptions& opts) {
    if (destination >= n.nets().size()) throw Error("unknown destination net id");
    auto dist_to_dest = dff_distance(n, destination, /*reverse=*/true);

    std::vector<PathVerdict> verdicts(origins.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= origins.size()) break;
            PathQuery q{origins[i], destination, opts.bound};
            verdicts[i] = sensitize_with_dist(n, q, opts, dist_to_dest[origins[i]]);
        }
    };
    int jobs = std::max(1, opts.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    std::map<NetId, PathVerdict> out;
    for (std::size_t i = 0; i < origins.size(); ++i)
        out.emplace(origins[i], std::move(verdicts[i]));
    return out;
}

} // namespace secov
