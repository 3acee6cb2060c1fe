#include <doctest.h>

#include "secov/assertion.hpp"
#include "secov/monitor.hpp"
#include "secov/netlist.hpp"
#include "testutil.hpp"

#include <random>

using namespace secov;

namespace {

ConstantTable opcodes() {
    return {{"OP_STORE", {false, true, false, true}}, {"OP_READ", {false, true, true, false}}};
}

// All bit-level signal names a monitor observes (fragment inputs sans clock).
std::vector<std::string> observed_bits(const MonitorCircuit& m) {
    std::vector<std::string> out;
    for (NetId pi : m.fragment.primary_inputs()) {
        if (m.fragment.clock() && *m.fragment.clock() == pi) continue;
        out.push_back(m.fragment.net_name(pi));
    }
    return out;
}

SignalTrace random_trace(const std::vector<std::string>& signals, int cycles,
                         std::mt19937& rng) {
    SignalTrace t;
    t.signals = signals;
    for (int c = 0; c < cycles; ++c) {
        std::vector<std::uint8_t> row;
        for (std::size_t i = 0; i < signals.size(); ++i)
            row.push_back(static_cast<std::uint8_t>(rng() % 2));
        t.values.push_back(std::move(row));
    }
    return t;
}

// The module's central check: simulated fail output == interpreter verdicts.
void check_equivalence(const AssertionAst& ast, const MonitorCircuit& m, int traces,
                       int cycles, unsigned seed) {
    std::mt19937 rng(seed);
    auto signals = observed_bits(m);
    int mismatches = 0;
    for (int round = 0; round < traces; ++round) {
        SignalTrace trace = random_trace(signals, cycles, rng);
        auto verdicts = interpret(ast, trace);
        Stimulus st;
        st.signals = trace.signals;
        st.values = trace.values;
        Trace sim = simulate(m.fragment, st);
        for (int t = 0; t < cycles; ++t) {
            bool fail_bit = sim.at(t, m.fail);
            bool expected = verdicts[t] == Verdict::Fail;
            if (fail_bit != expected) ++mismatches;
        }
    }
    CHECK(mismatches == 0);
}

MonitorCircuit compile_str(const std::string& name, const std::string& src,
                           const ConstantTable& consts = {}) {
    AssertionAst ast = parse_assertion({name, src}, consts);
    return compile_to_monitor(ast, resolve_widths(ast));
}

} // namespace

TEST_CASE("constant-true assertion compiles to fail = const0") {
    MonitorCircuit m = compile_str("T", "assert always {1'b1};");
    REQUIRE(m.cell_count() == 1);
    CHECK(m.fragment.cell(0).kind == CellKind::CONST0);
    CHECK(m.fragment.net_name(m.fragment.cell(0).output) == "fail");
    CHECK(m.dff_count() == 0);
}

TEST_CASE("table-style implication compiles combinationally") {
    AssertionAst ast = parse_assertion(
        {"ASR_1", "assert always {(!(IR == OP_STORE)) -> (!wr)}; @clock clk"}, opcodes());
    MonitorCircuit m = compile_to_monitor(ast, resolve_widths(ast));
    CHECK(m.dff_count() == 0); // purely combinational
    CHECK_FALSE(m.has_state);
    CHECK(m.bindings.at("IR").size() == 4);
    CHECK(m.bindings.at("IR").front() == "IR[3]");
    check_equivalence(ast, m, 200, 20, 11);
}

TEST_CASE("rose |=> monitor uses two history registers") {
    AssertionAst ast = parse_assertion(
        {"wePulse", "$rose(reg_we) |=> !(reg_we) @clock clk_i disable (!rst_ni)"});
    MonitorCircuit m = compile_to_monitor(ast, resolve_widths(ast));
    // one register holds prev(reg_we) for $rose, one holds the armed attempt
    CHECK(m.dff_count() == 2);
    CHECK(m.has_state);
    CHECK(m.clock == "clk_i");
    check_equivalence(ast, m, 500, 30, 22);
}

TEST_CASE("onehot0 monitor matches the interpreter") {
    SignalWidths w{{"addr_hit", 4}};
    AssertionAst ast = parse_assertion(
        {"en2addrHit", "(reg_we || reg_re) |-> $onehot0(addr_hit) @clock clk_i"});
    MonitorCircuit m = compile_to_monitor(ast, w);
    CHECK(m.bindings.at("addr_hit").size() == 4);
    check_equivalence(ast, m, 300, 20, 33);
}

TEST_CASE("onehot0 without width resolution is an error") {
    AssertionAst ast = parse_assertion({"x", "$onehot0(hits)"});
    CHECK_THROWS_WITH_AS(compile_to_monitor(ast, {}), doctest::Contains("width unresolved"),
                         Error);
}

TEST_CASE("non-always assertion uses a first-cycle flag") {
    AssertionAst ast = parse_assertion({"once", "assert {a};"});
    MonitorCircuit m = compile_to_monitor(ast, {});
    CHECK(m.dff_count() == 1);
    check_equivalence(ast, m, 100, 10, 44);
}

TEST_CASE("full fixture corpus: compiled monitors track the interpreter") {
    struct Entry {
        const char* file;
    };
    std::mt19937 rng(99);
    for (const char* file : {"miniproc.asr", "regtop.asr"}) {
        AssertionFile f = parse_assertion_file(testutil::read_fixture(file));
        for (const auto& spec : f.assertions) {
            AssertionAst ast = parse_assertion(spec, f.constants);
            SignalWidths w = resolve_widths(ast);
            for (auto& [base, width] : w)
                if (width == 0) width = 4; // onehot0 width for the trace harness
            MonitorCircuit m = compile_to_monitor(ast, w);
            CAPTURE(spec.name);
            check_equivalence(ast, m, 300, 25, rng());
        }
    }
}

TEST_CASE("binding ASR_1 to miniproc leaves the node list unchanged") {
    Netlist design = parse_netlist(testutil::read_fixture("miniproc.nl"));
    AssertionFile f = parse_assertion_file(testutil::read_fixture("miniproc.asr"));
    AssertionAst ast = parse_assertion(f.assertions[0], f.constants);
    MonitorCircuit m = compile_to_monitor(ast, resolve_widths(ast, design));
    Netlist merged = bind(design, m);

    auto names = [](const Netlist& n) {
        std::vector<std::string> v;
        for (NetId id : list_nodes(n)) v.push_back(n.net_name(id));
        return v;
    };
    CHECK(names(design) == names(merged));
    CHECK(merged.find_net("ASR_1.fail").has_value());
    // fail is a primary output of the merged netlist
    bool fail_is_output = false;
    for (NetId id : merged.primary_outputs())
        if (merged.net_name(id) == "ASR_1.fail") fail_is_output = true;
    CHECK(fail_is_output);
}

TEST_CASE("binding a monitor that references a missing signal fails") {
    Netlist design = parse_netlist(testutil::read_fixture("miniproc.nl"));
    MonitorCircuit m = compile_str("ghost", "assert always {no_such_signal};");
    CHECK_THROWS_WITH_AS(bind(design, m), doctest::Contains("unresolved binding"), BindError);
}

TEST_CASE("width mismatch against the design is rejected") {
    Netlist design = parse_netlist(testutil::read_fixture("miniproc.nl"));
    AssertionAst ast = parse_assertion({"w", "ir == 6'b010100 -> wr"});
    CHECK_THROWS_WITH_AS(resolve_widths(ast, design), doctest::Contains("width mismatch"),
                         BindError);
}

TEST_CASE("binding all four miniproc assertions yields four fail outputs") {
    Netlist design = parse_netlist(testutil::read_fixture("miniproc.nl"));
    AssertionFile f = parse_assertion_file(testutil::read_fixture("miniproc.asr"));
    std::vector<MonitorCircuit> ms;
    for (const auto& spec : f.assertions) {
        AssertionAst ast = parse_assertion(spec, f.constants);
        ms.push_back(compile_to_monitor(ast, resolve_widths(ast, design)));
    }
    Netlist merged = bind_all(design, ms);
    int fails = 0;
    for (NetId id : merged.primary_outputs())
        if (merged.net_name(id).find(".fail") != std::string::npos) ++fails;
    CHECK(fails == 4);
    CHECK(list_nodes(merged).size() == list_nodes(design).size());
}

TEST_CASE("monitors are pure observers") {
    Netlist design = parse_netlist(testutil::read_fixture("regtop.nl"));
    AssertionFile f = parse_assertion_file(testutil::read_fixture("regtop.asr"));
    std::vector<MonitorCircuit> ms;
    for (const auto& spec : f.assertions) {
        AssertionAst ast = parse_assertion(spec, f.constants);
        ms.push_back(compile_to_monitor(ast, resolve_widths(ast, design)));
    }
    Netlist merged = bind_all(design, ms);

    Stimulus st = testutil::random_stimulus(design, 60, 123);
    Trace alone = simulate(design, st);
    Trace bound = simulate(merged, st);
    for (std::size_t t = 0; t < st.values.size(); ++t)
        for (const auto& net : design.nets())
            CHECK(alone.at(t, net.id) == bound.at(t, *merged.find_net(net.name)));
}

TEST_CASE("assertions hold on their own fixture designs") {
    // The fixture assertions describe real invariants of the fixture blocks:
    // no monitor may fire on normal operation.
    for (auto [nl_file, asr_file] :
         {std::pair{"miniproc.nl", "miniproc.asr"}, std::pair{"regtop.nl", "regtop.asr"}}) {
        Netlist design = parse_netlist(testutil::read_fixture(nl_file));
        AssertionFile f = parse_assertion_file(testutil::read_fixture(asr_file));
        std::vector<MonitorCircuit> ms;
        for (const auto& spec : f.assertions) {
            AssertionAst ast = parse_assertion(spec, f.constants);
            ms.push_back(compile_to_monitor(ast, resolve_widths(ast, design)));
        }
        Netlist merged = bind_all(design, ms);
        for (unsigned seed = 1; seed <= 10; ++seed) {
            Stimulus st = testutil::random_stimulus(merged, 50, seed);
            // hold reset high after cycle 0 so the blocks run normally
            for (std::size_t i = 0; i < st.signals.size(); ++i)
                if (st.signals[i] == "rstn" || st.signals[i] == "rst_ni")
                    for (std::size_t t = 1; t < st.values.size(); ++t) st.values[t][i] = 1;
            Trace tr = simulate(merged, st);
            for (const auto& m : ms) {
                NetId fail = *merged.find_net(m.name + ".fail");
                for (std::size_t t = 0; t < st.values.size(); ++t) {
                    CAPTURE(m.name);
                    CAPTURE(t);
                    CHECK_FALSE(tr.at(t, fail));
                }
            }
        }
    }
}

TEST_CASE("monitor size stays linear in the elaborated assertion size") {
    std::vector<std::pair<std::string, std::string>> corpus = {
        {"a", "assert always {(!(IR == OP_STORE)) -> (!wr)};"},
        {"b", "assert always {(IR == OP_READ) -> (rd)};"},
        {"c", "$rose(reg_we) |=> !(reg_we) disable (!rst_ni)"},
        {"d", "$rose(reg_re || reg_we) |=> tl_o disable (!rst_ni)"},
        {"e", "(reg_we || reg_re) |-> $onehot0(addr_hit)"},
        {"f", "assert always {1'b1};"},
        {"g", "a && b || !c -> d"},
    };
    SignalWidths w{{"addr_hit", 8}};
    for (const auto& [name, src] : corpus) {
        AssertionAst ast = parse_assertion({name, src}, opcodes());
        SignalWidths widths = resolve_widths(ast);
        for (auto& [k, v] : widths)
            if (v == 0) v = w.count(k) ? w[k] : 4;
        MonitorCircuit m = compile_to_monitor(ast, widths);
        int weight = ast.size();
        for (const auto& [base, width] : widths) weight += width * width;
        CHECK(static_cast<int>(m.cell_count()) <= 4 * weight + 8);
    }
}

TEST_CASE("compilation is deterministic") {
    AssertionFile f = parse_assertion_file(testutil::read_fixture("regtop.asr"));
    Netlist design = parse_netlist(testutil::read_fixture("regtop.nl"));
    for (const auto& spec : f.assertions) {
        AssertionAst a1 = parse_assertion(spec, f.constants);
        AssertionAst a2 = parse_assertion(spec, f.constants);
        MonitorCircuit m1 = compile_to_monitor(a1, resolve_widths(a1, design));
        MonitorCircuit m2 = compile_to_monitor(a2, resolve_widths(a2, design));
        CHECK(print_netlist(m1.fragment) == print_netlist(m2.fragment));
    }
}
