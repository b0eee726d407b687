#include <doctest.h>

#include <random>
#include <sstream>

#include "ntb/error.hpp"
#include "ntb/route_map.hpp"
#include "support/oracles.hpp"

using namespace ntb;

namespace {

constexpr double kL = 1e6;

/// u = 0, a = 1, b = 2.
TransmissionNetwork triangle() {
  TransmissionNetwork net(3, false, kL);
  net.set(0, 1, 1);
  net.set(0, 2, 5);
  net.set(1, 2, 1);
  return net;
}

TransmissionNetwork random_network(std::mt19937_64& rng, std::size_t n, bool directed) {
  TransmissionNetwork net(n, directed, kL);
  std::uniform_int_distribution<int> weight(0, 6);
  std::bernoulli_distribution absent(0.3);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = directed ? 0 : i + 1; j < n; ++j) {
      if (i == j) continue;
      net.set(i, j, absent(rng) ? kL : weight(rng) * 0.5);
    }
  }
  return net;
}

}  // namespace

TEST_SUITE("route_map") {
  TEST_CASE("single node") {
    const RouteMap m = sbip(TransmissionNetwork(1, false, kL), 0);
    CHECK(m.min_energy == std::vector<double>{0.0});
    CHECK(m.routes == std::vector<std::vector<PatchIndex>>{{0}});
    CHECK(m.reachable == std::vector<bool>{true});
  }

  TEST_CASE("three-node toy takes the two-hop route") {
    const TransmissionNetwork net = triangle();
    const RouteMap m = sbip(net, 0);
    CHECK(m.min_energy == std::vector<double>{0, 1, 2});
    CHECK(m.routes[2] == std::vector<PatchIndex>{0, 1, 2});
    CHECK(m.settle_order == std::vector<PatchIndex>{0, 1, 2});
    const auto brute = oracle::all_simple_paths(net.matrix(), 3, 0, kL);
    CHECK(m.min_energy == brute);
  }

  TEST_CASE("nodes behind L edges stay unreachable") {
    TransmissionNetwork net(3, false, kL);
    net.set(0, 1, 2);
    const RouteMap m = sbip(net, 0);
    CHECK_FALSE(m.reachable[2]);
    CHECK(m.min_energy[2] >= kL);
    CHECK(m.routes[2].empty());
  }

  TEST_CASE("negative or NaN energies are rejected") {
    TransmissionNetwork net(2, true, kL);
    net.set(0, 1, -1);
    CHECK_THROWS_WITH_AS((void)sbip(net, 0), "negative energy unsupported", DataError);
    net.set(0, 1, std::nan(""));
    CHECK_THROWS_AS((void)sbip(net, 0), DataError);
    CHECK_THROWS_AS((void)sbip(triangle(), 3), DataError);
  }

  TEST_CASE("fast and literal scans build identical maps") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 1 + trial % 10;
      const auto net = random_network(rng, n, trial % 2 == 0);
      for (PatchIndex s = 0; s < n; ++s) REQUIRE(sbip(net, s) == sbip_full_scan(net, s));
    }
  }

  TEST_CASE("route maps agree with independent oracles") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 2 + trial % 7;
      const auto net = random_network(rng, n, trial % 3 == 0);
      const RouteMap m = sbip(net, 0);
      REQUIRE(m.min_energy == oracle::relaxation(net.matrix(), n, 0, kL));
      REQUIRE(m.min_energy == oracle::all_simple_paths(net.matrix(), n, 0, kL));
      for (PatchIndex v = 0; v < n; ++v) {
        if (!m.reachable[v]) continue;
        REQUIRE(m.routes[v].front() == 0);
        REQUIRE(m.routes[v].back() == v);
        REQUIRE(total_energy(PatchRoute(m.routes[v]), net) == m.min_energy[v]);
      }
    }
  }

  TEST_CASE("entrance maps and on-demand maps") {
    const TransmissionNetwork net = triangle();
    const RouteMapSet set(net, {0, 2});
    REQUIRE(set.maps().size() == 2);
    CHECK(set.find(0)->source == 0);
    CHECK(set.find(2)->min_energy == std::vector<double>{2, 1, 0});
    CHECK(set.find(1) == nullptr);

    const RouteMapSet none(net, {});
    const ResolvedMap r = resolve_route_map(none, net, 1);
    CHECK(r.on_demand);
    CHECK(r.map == sbip(net, 1));
    CHECK_FALSE(resolve_route_map(set, net, 2).on_demand);
  }

  TEST_CASE("repeat queries are identical") {
    std::mt19937_64 rng(3);
    const auto net = random_network(rng, 12, false);
    CHECK(sbip(net, 4) == sbip(net, 4));
  }

  TEST_CASE("pruning") {
    TransmissionNetwork net(3, false, kL);
    net.set(0, 1, 0.5);
    net.set(1, 2, 2.0);
    const RouteMap m = sbip(net, 0);
    const EdgeList all = tree_edges(m, net);
    REQUIRE(all.size() == 2);
    CHECK(prune_route_map(m, net, 2.0) == all);
    CHECK(prune_route_map(m, net, 0.1).empty());
    CHECK(prune_route_map(m, net, 1.0) == EdgeList{{0, 1, 0.5}});
  }

  TEST_CASE("DOT and CSV exports") {
    const TransmissionNetwork net = triangle();
    const RouteMap m = sbip(net, 0);
    std::ostringstream dot, csv;
    write_dot(dot, m, tree_edges(m, net));
    write_min_energy_csv(csv, m);
    CHECK(dot.str() ==
          "digraph route_map {\n  0 [shape=doublecircle];\n  0 -> 1 [label=\"1\"];\n"
          "  1 -> 2 [label=\"1\"];\n}\n");
    CHECK(csv.str() == "patch,E_min\n0,0\n1,1\n2,2\n");
  }
}
