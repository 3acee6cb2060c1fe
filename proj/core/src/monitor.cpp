#include "secov/monitor.hpp"

#include <algorithm>

namespace secov {

namespace {

// Fragment-side value: a net or a folded constant.
struct FVal {
    bool is_const = false;
    bool cval = false;
    NetId net = kNoNet;
};

FVal fconst(bool v) { return FVal{true, v, kNoNet}; }
FVal fnet(NetId id) { return FVal{false, false, id}; }

/// Builds monitor logic with constant folding and double-negation removal.
class FragmentBuilder {
  public:
    FragmentBuilder(const AssertionAst& ast, const SignalWidths& widths)
        : ast_(ast), widths_(widths) {}

    MonitorCircuit run() {
        MonitorCircuit m;
        m.name = ast_.name;
        m.clock = ast_.clock.empty() ? "clk" : ast_.clock;

        // observed signals become fragment primary inputs
        auto refs = referenced_signals(ast_);
        if (!ast_.clock.empty() &&
            (std::find(refs.scalars.begin(), refs.scalars.end(), ast_.clock) !=
                 refs.scalars.end() ||
             refs.buses.count(ast_.clock)))
            throw Error("assertion '" + ast_.name + "' references its clock as data");
        for (const auto& s : refs.scalars) {
            NetId id = b_.add_net(s);
            b_.mark_input(id);
            sig_[s] = id;
            m.bindings[s] = {s};
        }
        for (const auto& [base, w0] : refs.buses) {
            auto it = widths_.find(base);
            int w = it != widths_.end() ? it->second : w0;
            if (w <= 0)
                throw Error("width unresolved for bus '" + base +
                            "' (resolve against a design first)");
            auto bits = b_.add_bus(base, w - 1, 0);
            for (NetId bit : bits) b_.mark_input(bit);
            std::vector<std::string> names;
            for (int i = w - 1; i >= 0; --i) names.push_back(base + "[" + std::to_string(i) + "]");
            m.bindings[base] = std::move(names);
        }

        FVal dis = ast_.disable ? build(*ast_.disable) : fconst(false);
        FVal attempt = ast_.always ? fconst(true) : first_cycle_flag();
        FVal viol;
        switch (ast_.prop) {
            case PropKind::Plain:
                viol = f_and(attempt, f_not(build(*ast_.rhs)));
                break;
            case PropKind::Imply:
                viol = f_and(attempt, f_and(build(*ast_.lhs), f_not(build(*ast_.rhs))));
                break;
            case PropKind::NonOverlapImply: {
                FVal armed = f_and(attempt, f_and(build(*ast_.lhs), f_not(dis)));
                FVal pending = make_dff(armed, false);
                viol = f_and(pending, f_not(build(*ast_.rhs)));
                break;
            }
        }
        FVal fail = f_and(viol, f_not(dis));

        NetId fail_net = b_.add_net("fail");
        b_.mark_output(fail_net);
        if (fail.is_const) {
            b_.add_cell(fail.cval ? CellKind::CONST1 : CellKind::CONST0, next_cell(), {},
                        fail_net);
        } else {
            b_.add_cell(CellKind::BUF, next_cell(), {fail.net}, fail_net);
        }
        m.fragment = b_.build();
        m.fail = *m.fragment.find_net("fail");
        m.has_state = m.fragment.dff_count() > 0;
        return m;
    }

  private:
    std::string next_net() { return "m" + std::to_string(net_counter_++); }
    std::string next_cell() { return "mc" + std::to_string(cell_counter_++); }

    NetId clock_net() {
        if (clk_ == kNoNet) {
            clk_ = b_.add_net(ast_.clock.empty() ? "clk" : ast_.clock);
            b_.mark_input(clk_);
        }
        return clk_;
    }

    FVal make_dff(FVal d, bool init) {
        if (d.is_const && d.cval == init) return fconst(init); // never changes
        NetId q = b_.add_net(next_net());
        NetId din;
        if (d.is_const) {
            din = b_.add_net(next_net());
            b_.add_cell(d.cval ? CellKind::CONST1 : CellKind::CONST0, next_cell(), {}, din);
        } else {
            din = d.net;
        }
        b_.add_cell(CellKind::DFF, next_cell(), {din, clock_net()}, q, init);
        return fnet(q);
    }

    FVal first_cycle_flag() {
        if (first_ == kNoNet) {
            FVal q = make_dff(fconst(false), true);
            first_ = q.net;
        }
        return fnet(first_);
    }

    FVal f_not(FVal a) {
        if (a.is_const) return fconst(!a.cval);
        auto inv = inverted_.find(a.net);
        if (inv != inverted_.end()) return fnet(inv->second);
        NetId y = b_.add_net(next_net());
        b_.add_cell(CellKind::NOT, next_cell(), {a.net}, y);
        inverted_[a.net] = y;
        inverted_[y] = a.net; // double negation reuses the original
        return fnet(y);
    }

    FVal f_and(FVal a, FVal b) {
        if (a.is_const) return a.cval ? b : fconst(false);
        if (b.is_const) return b.cval ? a : fconst(false);
        if (a.net == b.net) return a;
        NetId y = b_.add_net(next_net());
        b_.add_cell(CellKind::AND, next_cell(), {a.net, b.net}, y);
        return fnet(y);
    }

    FVal f_or(FVal a, FVal b) {
        if (a.is_const) return a.cval ? fconst(true) : b;
        if (b.is_const) return b.cval ? fconst(true) : a;
        if (a.net == b.net) return a;
        NetId y = b_.add_net(next_net());
        b_.add_cell(CellKind::OR, next_cell(), {a.net, b.net}, y);
        return fnet(y);
    }

    FVal f_xnor(FVal a, FVal b) {
        if (a.is_const) return a.cval ? b : f_not(b);
        if (b.is_const) return b.cval ? a : f_not(a);
        if (a.net == b.net) return fconst(true);
        NetId y = b_.add_net(next_net());
        b_.add_cell(CellKind::XNOR, next_cell(), {a.net, b.net}, y);
        return fnet(y);
    }

    NetId bus_bit(const std::string& base, int i) {
        auto id = b_.find_net(base + "[" + std::to_string(i) + "]");
        if (!id) throw Error("internal: missing bus bit " + base);
        return *id;
    }

    FVal build(const Expr& e) {
        switch (e.kind) {
            case ExprKind::Const: return fconst(e.cval);
            case ExprKind::Signal: {
                auto it = sig_.find(e.name);
                if (it == sig_.end()) throw Error("internal: unknown signal " + e.name);
                return fnet(it->second);
            }
            case ExprKind::Not: return f_not(build(*e.args[0]));
            case ExprKind::And: return f_and(build(*e.args[0]), build(*e.args[1]));
            case ExprKind::Or: return f_or(build(*e.args[0]), build(*e.args[1]));
            case ExprKind::EqConst: {
                int w = static_cast<int>(e.pattern.size());
                // xnor-with-constant folds to the bit or its inverse
                FVal acc = fconst(true);
                for (int i = 0; i < w; ++i) {
                    FVal bit = fnet(bus_bit(e.name, w - 1 - i));
                    FVal match = f_xnor(bit, fconst(e.pattern[i]));
                    acc = f_and(acc, match);
                }
                return e.negated ? f_not(acc) : acc;
            }
            case ExprKind::OneHot0: {
                auto it = widths_.find(e.name);
                int w = it != widths_.end() ? it->second : 0;
                // at-most-one as a pairwise collision network
                FVal collision = fconst(false);
                for (int i = 0; i < w; ++i)
                    for (int j = i + 1; j < w; ++j)
                        collision = f_or(collision,
                                         f_and(fnet(bus_bit(e.name, i)), fnet(bus_bit(e.name, j))));
                return f_not(collision);
            }
            case ExprKind::Rose: {
                FVal cur = build(*e.args[0]);
                // previous value; initial 1 keeps $rose false at cycle 0
                FVal prev = make_dff(cur, true);
                return f_and(f_not(prev), cur);
            }
        }
        throw Error("unreachable expression kind");
    }

    const AssertionAst& ast_;
    const SignalWidths& widths_;
    NetlistBuilder b_;
    std::map<std::string, NetId> sig_;
    std::map<NetId, NetId> inverted_;
    NetId clk_ = kNoNet;
    NetId first_ = kNoNet;
    int net_counter_ = 0;
    int cell_counter_ = 0;
};

} // namespace

SignalWidths resolve_widths(const AssertionAst& ast) {
    SignalWidths w;
    for (const auto& [base, width] : referenced_signals(ast).buses) w[base] = width;
    return w;
}

SignalWidths resolve_widths(const AssertionAst& ast, const Netlist& design) {
    SignalWidths w;
    for (const auto& [base, width] : referenced_signals(ast).buses) {
        const Bus* bus = design.find_bus(base);
        if (!bus) throw BindError("assertion bus '" + base + "' not found in design");
        int dw = static_cast<int>(bus->bits.size());
        if (width != 0 && width != dw)
            throw BindError("width mismatch for '" + base + "': assertion uses " +
                            std::to_string(width) + " bits, design bus has " +
                            std::to_string(dw));
        w[base] = dw;
    }
    return w;
}

MonitorCircuit compile_to_monitor(const AssertionAst& ast, const SignalWidths& widths) {
    return FragmentBuilder(ast, widths).run();
}

Netlist bind(const Netlist& design, const MonitorCircuit& m) {
    return bind_all(design, {m});
}

Netlist bind_all(const Netlist& design, const std::vector<MonitorCircuit>& monitors) {
    NetlistBuilder b;
    // design portion is copied verbatim; net ids are preserved by order
    for (const auto& net : design.nets()) b.add_net(net.name, net.origin);
    for (const auto& bus : design.buses()) b.register_bus(bus.base, bus.msb, bus.lsb, bus.bits);
    for (const auto& c : design.cells())
        b.add_cell(c.kind, c.name, c.inputs, c.output, c.reset_value);
    for (NetId id : design.primary_inputs()) b.mark_input(id);
    for (NetId id : design.primary_outputs()) b.mark_output(id);

    for (const auto& m : monitors) {
        const Netlist& frag = m.fragment;
        // map fragment net -> merged net
        std::vector<NetId> map(frag.nets().size(), kNoNet);

        // observed signals resolve to design nets by name
        for (const auto& [sig, names] : m.bindings) {
            (void)sig;
            for (const auto& design_name : names) {
                auto frag_net = frag.find_net(design_name);
                if (!frag_net)
                    throw BindError("internal: fragment lacks observed net '" + design_name +
                                    "'");
                auto design_net = b.find_net(design_name);
                if (!design_net)
                    throw BindError("monitor '" + m.name + "': unresolved binding for '" +
                                    design_name + "'");
                map[*frag_net] = *design_net;
            }
        }
        // the fragment clock binds to the design clock (or introduces one)
        if (m.has_state) {
            auto frag_clk = frag.clock();
            if (!frag_clk)
                throw BindError("internal: stateful monitor without clock");
            if (design.clock()) {
                const std::string& dclk = design.net_name(*design.clock());
                if (dclk != m.clock)
                    throw BindError("monitor '" + m.name + "': assertion clock '" + m.clock +
                                    "' does not match design clock '" + dclk + "'");
                map[*frag_clk] = *b.find_net(dclk);
            } else {
                auto existing = b.find_net(m.clock);
                NetId clk = existing ? *existing : b.add_net(m.clock, NetOrigin::Monitor);
                if (!existing) b.mark_input(clk);
                map[*frag_clk] = clk;
            }
        }
        // remaining fragment nets come in with a monitor prefix
        for (const auto& net : frag.nets()) {
            if (map[net.id] != kNoNet) continue;
            map[net.id] = b.add_net(m.name + "." + net.name, NetOrigin::Monitor);
        }
        for (const auto& c : frag.cells()) {
            std::vector<NetId> ins;
            for (NetId in : c.inputs) ins.push_back(map[in]);
            b.add_cell(c.kind, m.name + "." + c.name, std::move(ins), map[c.output],
                       c.reset_value);
        }
        b.mark_output(map[m.fail]);
    }
    Netlist merged = b.build();
    return merged;
}

} // namespace secov
