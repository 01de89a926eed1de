#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>

#include "oracles.hpp"
#include "uta/assign.hpp"

using namespace uta;

namespace {

Network two_parallel_links() {
    std::vector<Node> nodes = {{1, true}, {2, true}};
    std::vector<Link> links = {{1, 2, 1.0, 10.0, 100.0, 0.15, 4.0, 1.0},
                               {1, 2, 1.0, 20.0, 100.0, 0.15, 4.0, 1.0}};
    // parallel links are modeled through an intermediate node to keep
    // endpoint pairs unique
    nodes.push_back({3, false});
    links[1] = {1, 3, 0.5, 10.0, 100.0, 0.15, 4.0, 1.0};
    links.push_back({3, 2, 0.5, 10.0, 100.0, 0.15, 4.0, 1.0});
    return Network(std::move(nodes), std::move(links), {1, 2});
}

/// Two genuinely parallel routes: direct fft 10 and two-hop fft 20 total.
/// Capacities 100 each, alpha 0.15, beta 4.
Matrix demand_150() {
    Matrix od = Matrix::square(2, 0.0);
    od.at(0, 1) = 150.0;
    return od;
}

void check_conservation(const Network& net, const std::vector<double>& flows, const Matrix& od) {
    for (const Node& node : net.nodes()) {
        int idx = net.node_index(node.id);
        double in = 0.0, out = 0.0;
        for (std::size_t l = 0; l < net.link_count(); ++l) {
            if (net.node_index(net.links()[l].from) == idx) out += flows[l];
            if (net.node_index(net.links()[l].to) == idx) in += flows[l];
        }
        double expected = 0.0;
        if (node.is_centroid) {
            int z = net.zone_index(node.id);
            for (std::size_t d = 0; d < net.zone_count(); ++d) {
                if (static_cast<int>(d) == z) continue;
                expected += od.at(z, d);   // originating
                expected -= od.at(d, z);   // terminating
            }
        }
        CHECK(out - in == doctest::Approx(expected).epsilon(1e-9).scale(1.0));
    }
}

}  // namespace

TEST_CASE("all_or_nothing single link and zero demand") {
    std::vector<Node> nodes = {{1, true}, {2, true}};
    std::vector<Link> links = {{1, 2, 1.0, 5.0, 100.0, 0.15, 4.0, 1.0}};
    Network net(std::move(nodes), std::move(links), {1, 2});
    Matrix od = Matrix::square(2, 0.0);
    od.at(0, 1) = 10.0;
    std::vector<double> costs = {5.0};
    auto flows = all_or_nothing(net, od, costs);
    CHECK(flows[0] == doctest::Approx(10.0));

    Matrix zero = Matrix::square(2, 0.0);
    auto none = all_or_nothing(net, zero, costs);
    CHECK(none[0] == 0.0);
}

TEST_CASE("all_or_nothing matches path enumeration at zero-flow costs") {
    Network net = oracles::braess_network(true);
    Matrix od = oracles::braess_demand(4000.0);
    std::vector<double> costs;
    for (const Link& l : net.links()) costs.push_back(bpr_time(l, 0.0));
    auto flows = all_or_nothing(net, od, costs);

    // cheapest zero-flow path is 1->3->4->2
    CHECK(flows[net.link_index(1, 3)] == doctest::Approx(4000.0));
    CHECK(flows[net.link_index(3, 4)] == doctest::Approx(4000.0));
    CHECK(flows[net.link_index(4, 2)] == doctest::Approx(4000.0));
    CHECK(flows[net.link_index(1, 4)] == 0.0);
    CHECK(flows[net.link_index(3, 2)] == 0.0);
    check_conservation(net, flows, od);
}

TEST_CASE("all_or_nothing rejects unreachable demand naming the pair") {
    std::vector<Node> nodes = {{1, true}, {2, true}};
    std::vector<Link> links = {{1, 2, 1.0, 5.0, 100.0, 0.15, 4.0, 1.0}};
    Network net(std::move(nodes), std::move(links), {1, 2});
    Matrix od = Matrix::square(2, 0.0);
    od.at(1, 0) = 3.0;  // 2 -> 1 has no link
    std::vector<double> costs = {5.0};
    CHECK_THROWS_WITH_AS(all_or_nothing(net, od, costs), doctest::Contains("2->1"),
                         std::invalid_argument);
}

TEST_CASE("beckmann closed form") {
    std::vector<Node> nodes = {{1, true}, {2, true}};
    std::vector<Link> links = {{1, 2, 1.0, 10.0, 100.0, 0.15, 4.0, 1.0}};
    Network net(std::move(nodes), std::move(links), {1, 2});
    std::vector<double> zero = {0.0};
    CHECK(beckmann(net, zero) == 0.0);
    std::vector<double> at_capacity = {100.0};
    CHECK(beckmann(net, at_capacity) == doctest::Approx(1030.0).epsilon(1e-12));
    std::vector<double> doubled = {200.0};
    CHECK(beckmann(net, doubled) > beckmann(net, at_capacity));
}

TEST_CASE("relative_gap basics") {
    Network net = two_parallel_links();
    Matrix od = demand_150();

    // single-path subcase: all demand on the only used route of a one-route net
    std::vector<Node> nodes = {{1, true}, {2, true}};
    std::vector<Link> links = {{1, 2, 1.0, 5.0, 100.0, 0.15, 4.0, 1.0}};
    Network line(std::move(nodes), std::move(links), {1, 2});
    Matrix line_od = Matrix::square(2, 0.0);
    line_od.at(0, 1) = 40.0;
    std::vector<double> line_flows = {40.0};
    CHECK(relative_gap(line, line_flows, line_od) == doctest::Approx(0.0).epsilon(1e-14));

    // everything on the worse (two-hop, fft 20) route: strictly positive gap
    std::vector<double> unbalanced(net.link_count(), 0.0);
    unbalanced[net.link_index(1, 3)] = 150.0;
    unbalanced[net.link_index(3, 2)] = 150.0;
    CHECK(relative_gap(net, unbalanced, od) > 0.0);

    std::vector<double> zero(net.link_count(), 0.0);
    CHECK_THROWS_AS(relative_gap(net, zero, od), std::invalid_argument);
}

TEST_CASE("relative_gap vanishes at the oracle equilibrium") {
    Matrix od = oracles::braess_demand(4000.0);
    for (bool center : {false, true}) {
        Network net = oracles::braess_network(center);
        oracles::EquilibriumOracle oracle = oracles::path_equilibrium(net, od);
        CHECK(relative_gap(net, oracle.link_flows, od) < 1e-10);
        CHECK(relative_gap(net, oracle.link_flows, od) >= -1e-12);
    }
}

TEST_CASE("frank_wolfe matches the two-route bisection oracle at demand 150") {
    // At 150 PCE/h the equilibrium is a corner: the fft-10 route stays below
    // the unused route's 20 min (t = 17.59 at v/c = 1.5), so equal times are
    // not attainable; the binding check is the brute-force equilibrium match.
    Network net = two_parallel_links();
    Matrix od = demand_150();
    AssignmentOptions opts;
    opts.relative_gap_target = 1e-10;
    opts.max_iterations = 5000;
    FlowState state = frank_wolfe(net, od, opts);
    REQUIRE(state.converged);

    const Link direct = net.links()[net.link_index(1, 2)];
    const Link hop = net.links()[net.link_index(1, 3)];
    double lo = 0.0, hi = 150.0;
    for (int b = 0; b < 200; ++b) {
        double mid = 0.5 * (lo + hi);
        double diff = bpr_time(direct, mid) - 2.0 * bpr_time(hop, 150.0 - mid);
        if (diff < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    double oracle_direct = lo;
    CHECK(std::abs(state.flow[net.link_index(1, 2)] - oracle_direct) < 1e-3);
    CHECK(std::abs(state.flow[net.link_index(1, 3)] - (150.0 - oracle_direct)) < 1e-3);

    // user-equilibrium optimality: no unused route is cheaper than a used one
    double t_direct = state.time[net.link_index(1, 2)];
    double t_route_b = state.time[net.link_index(1, 3)] + state.time[net.link_index(3, 2)];
    CHECK(t_direct <= t_route_b + 1e-6);
    check_conservation(net, state.flow, od);
}

TEST_CASE("frank_wolfe equalizes route times on an interior split") {
    // demand above ~160.7 pushes the direct route past 20 min, so both
    // routes carry flow and their generalized times meet
    Network net = two_parallel_links();
    Matrix od = Matrix::square(2, 0.0);
    od.at(0, 1) = 300.0;
    AssignmentOptions opts;
    opts.relative_gap_target = 1e-10;
    opts.max_iterations = 5000;
    FlowState state = frank_wolfe(net, od, opts);
    REQUIRE(state.converged);

    CHECK(state.flow[net.link_index(1, 2)] > 1.0);
    CHECK(state.flow[net.link_index(1, 3)] > 1.0);
    double t_direct = state.time[net.link_index(1, 2)];
    double t_route_b = state.time[net.link_index(1, 3)] + state.time[net.link_index(3, 2)];
    CHECK(t_direct == doctest::Approx(t_route_b).epsilon(1e-6));

    oracles::EquilibriumOracle oracle = oracles::path_equilibrium(net, od);
    for (std::size_t l = 0; l < net.link_count(); ++l)
        CHECK(std::abs(state.flow[l] - oracle.link_flows[l]) < 1e-3);
    check_conservation(net, state.flow, od);
}

TEST_CASE("frank_wolfe reproduces the braess paradox") {
    Matrix od = oracles::braess_demand(4000.0);
    AssignmentOptions opts;
    opts.relative_gap_target = 1e-6;

    Network without = oracles::braess_network(false);
    Network with = oracles::braess_network(true);
    FlowState state_without = frank_wolfe(without, od, opts);
    FlowState state_with = frank_wolfe(with, od, opts);
    REQUIRE(state_without.converged);
    REQUIRE(state_with.converged);

    oracles::EquilibriumOracle oracle_without = oracles::path_equilibrium(without, od);
    oracles::EquilibriumOracle oracle_with = oracles::path_equilibrium(with, od);
    for (std::size_t l = 0; l < without.link_count(); ++l)
        CHECK(std::abs(state_without.flow[l] - oracle_without.link_flows[l]) < 1e-3);
    for (std::size_t l = 0; l < with.link_count(); ++l)
        CHECK(std::abs(state_with.flow[l] - oracle_with.link_flows[l]) < 1e-3);

    SkimResult skim_without = skims(without, state_without.flow);
    SkimResult skim_with = skims(with, state_with.flow);
    CHECK(skim_with.time.at(0, 1) > skim_without.time.at(0, 1) + 1.0);
}

TEST_CASE("frank_wolfe zero demand short-circuits") {
    Network net = two_parallel_links();
    Matrix od = Matrix::square(2, 0.0);
    FlowState state = frank_wolfe(net, od);
    CHECK(state.converged);
    CHECK(state.iterations == 1);
    CHECK(state.gap_history == std::vector<double>{0.0});
    for (double f : state.flow) CHECK(f == 0.0);
}

TEST_CASE("frank_wolfe beckmann objective is non-increasing with exact search") {
    Network net = two_parallel_links();
    Matrix od = Matrix::square(2, 0.0);
    od.at(0, 1) = 300.0;  // interior equilibrium: several line-search steps
    AssignmentOptions opts;
    opts.relative_gap_target = 1e-9;
    opts.max_iterations = 2000;
    FlowState state = frank_wolfe(net, od, opts);
    REQUIRE(state.objective_history.size() > 1);
    for (std::size_t k = 1; k < state.objective_history.size(); ++k)
        CHECK(state.objective_history[k] <=
              state.objective_history[k - 1] + 1e-12 + 4e-16 * std::abs(state.objective_history[k - 1]));
    for (double gap : state.gap_history) CHECK(gap >= -1e-12);
    CHECK(state.gap_history.back() <= opts.relative_gap_target);
}

TEST_CASE("frank_wolfe msa fallback converges on the parallel net") {
    Network net = two_parallel_links();
    Matrix od = Matrix::square(2, 0.0);
    od.at(0, 1) = 300.0;
    AssignmentOptions opts;
    opts.line_search = LineSearch::msa;
    opts.relative_gap_target = 1e-5;
    opts.max_iterations = 4000;
    FlowState state = frank_wolfe(net, od, opts);
    CHECK(state.converged);
    double t_direct = state.time[net.link_index(1, 2)];
    double t_route_b = state.time[net.link_index(1, 3)] + state.time[net.link_index(3, 2)];
    CHECK(t_direct == doctest::Approx(t_route_b).epsilon(1e-3));
}

TEST_CASE("frank_wolfe link flows match the path oracle on small fixtures") {
    AssignmentOptions opts;
    opts.relative_gap_target = 1e-9;
    opts.max_iterations = 20000;

    SUBCASE("2x2 grid, two opposing OD pairs") {
        std::vector<Node> nodes = {{1, true}, {2, true}, {3, false}, {4, false}};
        std::vector<Link> links = {
            {1, 3, 1.0, 4.0, 300.0, 0.15, 4.0, 1.0}, {3, 2, 1.0, 4.0, 300.0, 0.15, 4.0, 1.0},
            {1, 4, 1.0, 5.0, 400.0, 0.15, 4.0, 1.0}, {4, 2, 1.0, 5.0, 400.0, 0.15, 4.0, 1.0},
            {3, 4, 1.0, 1.0, 200.0, 0.15, 4.0, 1.0}, {2, 1, 1.0, 6.0, 500.0, 0.15, 4.0, 1.0},
        };
        Network net(std::move(nodes), std::move(links), {1, 2});
        Matrix od = Matrix::square(2, 0.0);
        od.at(0, 1) = 700.0;
        od.at(1, 0) = 150.0;

        FlowState state = frank_wolfe(net, od, opts);
        REQUIRE(state.converged);
        oracles::EquilibriumOracle oracle = oracles::path_equilibrium(net, od);
        for (std::size_t l = 0; l < net.link_count(); ++l)
            CHECK(std::abs(state.flow[l] - oracle.link_flows[l]) < 1e-3);
        check_conservation(net, state.flow, od);
    }

    SUBCASE("ring of three OD pairs with interior route splits") {
        std::vector<Node> nodes = {{1, true},  {2, true},  {3, true},
                                   {4, false}, {5, false}, {6, false}};
        std::vector<Link> links = {
            {1, 2, 1.0, 10.0, 100.0, 0.15, 4.0, 1.0},
            {1, 4, 0.5, 6.0, 150.0, 0.15, 4.0, 1.0}, {4, 2, 0.5, 6.0, 150.0, 0.15, 4.0, 1.0},
            {2, 3, 1.0, 8.0, 120.0, 0.15, 4.0, 1.0},
            {2, 5, 0.5, 5.0, 140.0, 0.15, 4.0, 1.0}, {5, 3, 0.5, 5.0, 140.0, 0.15, 4.0, 1.0},
            {3, 1, 1.0, 12.0, 150.0, 0.15, 4.0, 1.0},
            {3, 6, 0.5, 7.0, 160.0, 0.15, 4.0, 1.0}, {6, 1, 0.5, 7.0, 160.0, 0.15, 4.0, 1.0},
        };
        Network net(std::move(nodes), std::move(links), {1, 2, 3});
        Matrix od = Matrix::square(3, 0.0);
        od.at(0, 1) = 300.0;
        od.at(1, 2) = 250.0;
        od.at(2, 0) = 200.0;

        FlowState state = frank_wolfe(net, od, opts);
        REQUIRE(state.converged);
        oracles::EquilibriumOracle oracle = oracles::path_equilibrium(net, od);
        for (std::size_t l = 0; l < net.link_count(); ++l)
            CHECK(std::abs(state.flow[l] - oracle.link_flows[l]) < 1e-3);
        check_conservation(net, state.flow, od);
    }
}

TEST_CASE("frank_wolfe is deterministic across runs") {
    Network net = oracles::braess_network(true);
    Matrix od = oracles::braess_demand(4000.0);
    FlowState a = frank_wolfe(net, od);
    FlowState b = frank_wolfe(net, od);
    REQUIRE(a.flow.size() == b.flow.size());
    CHECK(std::memcmp(a.flow.data(), b.flow.data(), a.flow.size() * sizeof(double)) == 0);
    CHECK(std::memcmp(a.time.data(), b.time.data(), a.time.size() * sizeof(double)) == 0);
    CHECK(a.beckmann_value == b.beckmann_value);
}

TEST_CASE("skims report congested times and path distances") {
    std::vector<Node> nodes = {{1, true}, {2, true}};
    std::vector<Link> links = {{1, 2, 2.5, 10.0, 100.0, 0.15, 4.0, 1.0},
                               {2, 1, 2.5, 10.0, 100.0, 0.15, 4.0, 1.0}};
    Network net(std::move(nodes), std::move(links), {1, 2});

    std::vector<double> zero = {0.0, 0.0};
    SkimResult free_flow = skims(net, zero);
    CHECK(free_flow.time.at(0, 1) == doctest::Approx(10.0));
    CHECK(free_flow.distance.at(0, 1) == doctest::Approx(2.5));

    std::vector<double> at_capacity = {100.0, 0.0};
    SkimResult congested = skims(net, at_capacity);
    CHECK(congested.time.at(0, 1) == doctest::Approx(11.5).epsilon(1e-12));

    // symmetric network, symmetric flows -> symmetric skims
    std::vector<double> both = {60.0, 60.0};
    SkimResult sym = skims(net, both);
    CHECK(sym.time.at(0, 1) == doctest::Approx(sym.time.at(1, 0)).epsilon(1e-14));
    CHECK(sym.distance.at(0, 1) == doctest::Approx(sym.distance.at(1, 0)).epsilon(1e-14));
}

TEST_CASE("skims flag unreachable pairs with the infinite sentinel") {
    std::vector<Node> nodes = {{1, true}, {2, true}};
    std::vector<Link> links = {{1, 2, 1.0, 5.0, 100.0, 0.15, 4.0, 1.0}};
    Network net(std::move(nodes), std::move(links), {1, 2});
    std::vector<double> flows = {0.0};
    SkimResult result = skims(net, flows);
    CHECK(std::isinf(result.time.at(1, 0)));
    CHECK(std::isinf(result.distance.at(1, 0)));
}
