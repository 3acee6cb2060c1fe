#include <doctest.h>

#include "secov/netlist.hpp"
#include "secov/pathcheck.hpp"
#include "testutil.hpp"

#include <random>

using namespace secov;

namespace {

NetId net(const Netlist& n, const std::string& name) {
    auto id = n.find_net(name);
    REQUIRE_MESSAGE(id.has_value(), "net not found: " << name);
    return *id;
}

} // namespace

TEST_CASE("structural reachability basics") {
    Netlist n = parse_netlist("buf(b1,a); buf(b2,b1); buf(b3,b2); and(y,b3,z);");
    CHECK(structural_reach(n, net(n, "a"), net(n, "a"))); // empty path
    CHECK(structural_reach(n, net(n, "a"), net(n, "y")));
    CHECK(structural_reach(n, net(n, "b2"), net(n, "y")));
    CHECK_FALSE(structural_reach(n, net(n, "y"), net(n, "a")));
    CHECK_FALSE(structural_reach(n, net(n, "z"), net(n, "b1")));
}

TEST_CASE("sequential distance counts DFF crossings") {
    Netlist n = parse_netlist("dff(q1, d, clk); dff(q2, q1, clk); dff(q3, q2, clk);");
    CHECK(sequential_distance(n, net(n, "d"), net(n, "q3")) == 3);
    CHECK(sequential_distance(n, net(n, "q1"), net(n, "q3")) == 2);
    CHECK(sequential_distance(n, net(n, "d"), net(n, "d")) == 0);
    CHECK_FALSE(sequential_distance(n, net(n, "q3"), net(n, "d")).has_value());
}

TEST_CASE("masked AND is unreachable at bound") {
    Netlist n = parse_netlist("const0(z); and(y, a, z);");
    PathVerdict v = sensitize(n, {net(n, "a"), net(n, "y"), 1});
    CHECK(v.status == PathStatus::UnreachableAtBound);
    CHECK(v.stats.bound == 1);
}

TEST_CASE("buffer chain is reachable at bound 1 with a valid witness") {
    Netlist n = parse_netlist("buf(b1,a); buf(b2,b1); buf(y,b2);");
    PathVerdict v = sensitize(n, {net(n, "a"), net(n, "y"), 1});
    REQUIRE(v.status == PathStatus::Reachable);
    REQUIRE(v.witness.has_value());
    CHECK(v.witness->flip_cycle == 0);
    CHECK(v.witness->diverge_cycle == 0);
}

TEST_CASE("3-DFF shift chain needs bound 4") {
    Netlist n = parse_netlist("dff(q1, d, clk); dff(q2, q1, clk); dff(q3, q2, clk);");
    PathQuery q3{net(n, "d"), net(n, "q3"), 3};
    CHECK(sensitize(n, q3).status == PathStatus::UnreachableAtBound);
    CHECK_FALSE(brute_force_reach(n, q3));
    PathQuery q4{net(n, "d"), net(n, "q3"), 4};
    PathVerdict v = sensitize(n, q4);
    REQUIRE(v.status == PathStatus::Reachable);
    CHECK(v.witness->flip_cycle == 0);
    CHECK(v.witness->diverge_cycle == 3);
    CHECK(brute_force_reach(n, q4));
    // default bound = distance + 2 also reaches
    CHECK(sensitize(n, {net(n, "d"), net(n, "q3"), std::nullopt}).status ==
          PathStatus::Reachable);
}

TEST_CASE("structurally disconnected origin short-circuits") {
    Netlist n = parse_netlist("buf(y,a); buf(w,z);");
    PathVerdict v = sensitize(n, {net(n, "z"), net(n, "y"), 4});
    CHECK(v.status == PathStatus::UnreachableStructural);
    CHECK(v.stats.conflicts == 0);
}

TEST_CASE("brute force enforces its limits") {
    Netlist n = parse_netlist(testutil::read_fixture("toyproc.nl"));
    PathQuery q{n.nodes().front(), n.nodes().back(), 5};
    CHECK_THROWS_WITH_AS(brute_force_reach(n, q), doctest::Contains("enumeration limits"),
                         Error);
}

TEST_CASE("oracle equivalence on random circuits") {
    std::mt19937 rng(424242);
    int checked = 0;
    for (unsigned seed = 1; checked < 150; ++seed) {
        Netlist n = testutil::random_circuit(seed);
        const auto& nodes = n.nodes();
        if (nodes.size() < 2) continue;
        for (int qi = 0; qi < 3; ++qi) {
            NetId origin = nodes[rng() % nodes.size()];
            NetId dest = nodes[rng() % nodes.size()];
            int bound = 1 + static_cast<int>(rng() % 4);
            PathQuery q{origin, dest, bound};
            PathVerdict v = sensitize(n, q);
            REQUIRE(v.status != PathStatus::Unknown);
            bool expect = brute_force_reach(n, q);
            bool got = v.status == PathStatus::Reachable;
            CAPTURE(seed);
            CAPTURE(n.net_name(origin));
            CAPTURE(n.net_name(dest));
            CAPTURE(bound);
            CHECK(got == expect);
            ++checked;
        }
    }
}

TEST_CASE("reachable implies structurally reachable and witnesses replay") {
    std::mt19937 rng(7777);
    for (unsigned seed = 100; seed < 140; ++seed) {
        Netlist n = testutil::random_circuit(seed);
        const auto& nodes = n.nodes();
        for (int qi = 0; qi < 4; ++qi) {
            NetId origin = nodes[rng() % nodes.size()];
            NetId dest = nodes[rng() % nodes.size()];
            PathQuery q{origin, dest, 1 + static_cast<int>(rng() % 4)};
            PathVerdict v = sensitize(n, q);
            if (v.status == PathStatus::Reachable) {
                CHECK(structural_reach(n, origin, dest));
                REQUIRE(v.witness.has_value());
                Trace golden = simulate(n, v.witness->stimulus);
                Trace faulty =
                    simulate(n, v.witness->stimulus, Flip{origin, v.witness->flip_cycle});
                CHECK(golden.at(v.witness->diverge_cycle, dest) !=
                      faulty.at(v.witness->diverge_cycle, dest));
            }
        }
    }
}

TEST_CASE("bound monotonicity") {
    std::mt19937 rng(31337);
    for (unsigned seed = 200; seed < 215; ++seed) {
        Netlist n = testutil::random_circuit(seed);
        const auto& nodes = n.nodes();
        NetId origin = nodes[rng() % nodes.size()];
        NetId dest = nodes[rng() % nodes.size()];
        for (int k = 1; k < 4; ++k) {
            if (sensitize(n, {origin, dest, k}).status == PathStatus::Reachable) {
                CHECK(sensitize(n, {origin, dest, k + 1}).status == PathStatus::Reachable);
                CHECK(sensitize(n, {origin, dest, k + 2}).status == PathStatus::Reachable);
                break;
            }
        }
    }
}

TEST_CASE("batch check prunes, is deterministic and parallel-safe") {
    Netlist n = parse_netlist(testutil::read_fixture("sample12.nl"));
    NetId dest = net(n, "z");
    auto nodes = list_nodes(n);
    BatchOptions opts;
    auto seq = batch_check(n, dest, nodes, opts);
    opts.jobs = 8;
    auto par = batch_check(n, dest, nodes, opts);
    REQUIRE(seq.size() == par.size());
    for (const auto& [id, v] : seq) {
        CHECK(par.at(id).status == v.status);
        CHECK(par.at(id).stats.bound == v.stats.bound);
    }
    // an origin with no structural path never reaches the solver
    bool found_structural = false;
    for (const auto& [id, v] : seq)
        if (v.status == PathStatus::UnreachableStructural) {
            found_structural = true;
            CHECK(v.stats.conflicts == 0);
        }
    CHECK(found_structural); // y does not feed z in sample12
}

TEST_CASE("batch against a destination with an empty fan-in cone") {
    Netlist n = parse_netlist("const1(y); buf(w,a); buf(v,b);");
    auto nodes = list_nodes(n);
    std::vector<NetId> origins;
    for (NetId id : nodes)
        if (id != net(n, "y")) origins.push_back(id);
    auto res = batch_check(n, net(n, "y"), origins, {});
    for (const auto& [id, v] : res) CHECK(v.status == PathStatus::UnreachableStructural);
}

TEST_CASE("zero conflict budget cannot claim unreachable-at-bound") {
    Netlist n = parse_netlist(testutil::read_fixture("sample12.nl"));
    SensitizeOptions opts;
    opts.budget_conflicts = 0;
    PathVerdict v = sensitize(n, {net(n, "a"), net(n, "z"), 4}, opts);
    CHECK(v.status != PathStatus::UnreachableAtBound);
}
