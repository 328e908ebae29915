#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "properties.hpp"
#include "wsnids/error.hpp"
#include "wsnids/wsn.hpp"

namespace {

using namespace wsnids;
using namespace wsnids::sim;

TEST(IdsCount, Formula) {
  EXPECT_EQ(ids_count(1.0, 10.0), 16u);
  EXPECT_EQ(ids_count(0.0, 10.0), 0u);
  EXPECT_EQ(ids_count(1.5, 8.0), 29u);
  EXPECT_EQ(ids_count(0.1, 0.01), 1u);
  EXPECT_THROW(ids_count(-1.0, 1.0), InvalidInput);
  EXPECT_THROW(ids_count(1.0, -1.0), InvalidInput);
}

TEST(IdsCount, DefaultDeploymentGivesEighteen) {
  EXPECT_EQ(ids_count(33.5, 100.0 / 10000.0), 18u);
}

TEST(BuildTopology, PartitionsAllNodes) {
  const auto t = build_topology(100, 10000, 33.5, 3, 7);
  ASSERT_EQ(t.clusters.size(), 3u);
  std::set<NodeId> seen;
  for (const auto& c : t.clusters) {
    EXPECT_EQ(t.nodes[c.head].role, Role::ClusterHead);
    EXPECT_GT(t.nodes[c.head].initial_energy_nj, t.nodes[c.members.front()].initial_energy_nj);
    seen.insert(c.head);
    for (auto m : c.members) {
      EXPECT_TRUE(seen.insert(m).second);
      EXPECT_EQ(t.nodes[m].cluster_id, c.id);
    }
  }
  EXPECT_EQ(seen.size(), 100u);
  EXPECT_DOUBLE_EQ(t.density(), 0.01);
}

TEST(BuildTopology, EveryNodeItsOwnHead) {
  const auto t = build_topology(10, 100, 5, 10, 1);
  for (const auto& c : t.clusters) EXPECT_TRUE(c.members.empty());
}

TEST(BuildTopology, DeterministicPerSeed) {
  const auto a = build_topology(100, 10000, 33.5, 3, 4);
  const auto b = build_topology(100, 10000, 33.5, 3, 4);
  std::ostringstream sa, sb;
  Network(a, {}).write_topology_csv(sa);
  Network(b, {}).write_topology_csv(sb);
  EXPECT_EQ(sa.str(), sb.str());
  std::ostringstream sc;
  Network(build_topology(100, 10000, 33.5, 3, 5), {}).write_topology_csv(sc);
  EXPECT_NE(sa.str(), sc.str());
}

TEST(BuildTopology, UnreachableNodeRaises) {
  EXPECT_THROW(build_topology(20, 1e8, 1.0, 1, 1), TopologyError);
  EXPECT_THROW(build_topology(5, 100, 5, 6, 1), InvalidInput);
}

TEST(PlaceIds, OnePerClusterAtFloor) {
  auto t = build_topology(100, 10000, 33.5, 3, 2);
  place_ids(t, 3);
  for (const auto& c : t.clusters) EXPECT_EQ(t.ids_agents(c.id).size(), 1u);
}

TEST(PlaceIds, CoverageFloorAndCount) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto t = build_topology(100, 10000, 33.5, 3, seed);
    place_ids(t, 18);
    EXPECT_EQ(t.all_ids_agents().size(), 18u);
    for (const auto& c : t.clusters) EXPECT_GE(t.ids_agents(c.id).size(), 1u);
  }
}

TEST(PlaceIds, Rejections) {
  auto t = build_topology(10, 100, 5, 2, 1);
  EXPECT_THROW(place_ids(t, 0), InvalidInput);
  EXPECT_THROW(place_ids(t, 9), InvalidInput);
}

TEST(PlaceIds, EqualCoverageGoesToLowerId) {
  // Two symmetric candidates around one head, each covering one link.
  Topology t;
  t.comm_range = 10;
  t.area = 100;
  for (NodeId i = 0; i < 3; ++i) {
    SensorNode n;
    n.id = i;
    n.position = {i == 0 ? 0.0 : (i == 1 ? -5.0 : 5.0), 0.0};
    n.role = i == 0 ? Role::ClusterHead : Role::Ordinary;
    t.nodes.push_back(n);
  }
  t.clusters.push_back({0, 0, {1, 2}});
  place_ids(t, 1);
  EXPECT_EQ(t.all_ids_agents(), std::vector<NodeId>{1});
}

TEST(Charge, DeclaredConstants) {
  Network net(testkit::star_cluster(1, 1), {});
  const auto before = net.node(1).energy_nj;
  net.charge(1, 100, Direction::Send);
  EXPECT_EQ(before - net.node(1).energy_nj, 5'000'000);  // 5 mJ in nJ
  net.charge(1, 0, Direction::Send);
  EXPECT_EQ(before - net.node(1).energy_nj, 5'000'000);
  net.charge(1, 100, Direction::Receive);
  EXPECT_EQ(before - net.node(1).energy_nj, 7'500'000);
  EXPECT_DOUBLE_EQ(net.instruction_equivalents(100), 720'000.0);
}

TEST(Charge, ExhaustionKillsNode) {
  EnergyConfig e;
  e.node_initial_j = 0.001;
  Network net(testkit::star_cluster(1, 0, e), e);
  net.charge(1, 100, Direction::Send);
  EXPECT_TRUE(net.node(1).dead);
  EXPECT_EQ(net.node(1).energy_nj, 0);
  EXPECT_TRUE(net.ledger().events().back().died);
}

TEST(Charge, IsolatedNodeRejected) {
  Network net(testkit::star_cluster(1, 1), {});
  net.isolate(2);
  EXPECT_THROW(net.charge(2, 10, Direction::Send), InvalidInput);
  net.transmit({1, 2}, 10);  // the isolated end is skipped
  EXPECT_EQ(net.ledger().totals(2).bytes_received, 0u);
}

TEST(Ledger, ConservationAndMonotonicity) {
  auto t = build_topology(60, 6000, 33.5, 3, 9);
  place_ids(t, 10);
  Network net(t, {});
  std::vector<std::int64_t> last(60);
  for (const auto& n : net.topology().nodes) last[n.id] = n.energy_nj;
  for (NodeId i = 0; i < 60; ++i) {
    for (const auto& hop : net.route(i, (i * 7 + 3) % 60)) net.transmit(hop, 40 + i);
    for (const auto& n : net.topology().nodes) {
      EXPECT_LE(n.energy_nj, last[n.id]);
      last[n.id] = n.energy_nj;
    }
  }
  std::int64_t sum = 0;
  for (const auto& r : net.ledger().events()) sum += r.charged_nj;
  EXPECT_EQ(sum, net.ledger().total_spent_nj());
  for (const auto& n : net.topology().nodes) {
    EXPECT_EQ(n.initial_energy_nj - n.energy_nj, net.ledger().totals(n.id).spent_nj);
    EXPECT_GE(n.energy_nj, 0);
    EXPECT_LE(n.energy_nj, n.initial_energy_nj);
  }
}

TEST(Route, DirectOrRelayed) {
  auto t = build_topology(100, 10000, 33.5, 3, 3);
  Network net(t, {});
  const auto& topo = net.topology();
  for (NodeId a = 0; a < 100; a += 7) {
    for (NodeId b = 0; b < 100; b += 11) {
      const auto hops = net.route(a, b);
      if (a == b) {
        EXPECT_TRUE(hops.empty());
        continue;
      }
      ASSERT_FALSE(hops.empty());
      EXPECT_EQ(hops.front().from, a);
      EXPECT_EQ(hops.back().to, b);
      const bool direct = topo.in_range(a, b) || topo.nodes[a].role == Role::ClusterHead ||
                          topo.nodes[b].role == Role::ClusterHead;
      EXPECT_EQ(hops.size() == 1, direct);
    }
  }
}

void set_share(Network& net, NodeId id, double share) {
  auto& n = net.topology().nodes[id];
  n.energy_nj = std::llround(static_cast<double>(n.initial_energy_nj) * share);
}

TEST(Reelection, ThreeOfFourBelowHalfFires) {
  Network net(testkit::star_cluster(4, 6), {});
  set_share(net, 1, 0.49);
  set_share(net, 2, 0.49);
  set_share(net, 3, 0.49);
  set_share(net, 4, 0.80);
  const auto ev = net.reelect_check(0);
  ASSERT_TRUE(ev.has_value());
  EXPECT_FALSE(ev->degraded);
  EXPECT_EQ(ev->demoted, (std::vector<NodeId>{1, 2, 3, 4}));
  EXPECT_EQ(ev->promoted.size(), 4u);
  for (auto id : net.topology().ids_agents(0)) EXPECT_GE(2 * net.node(id).energy_nj, net.node(id).initial_energy_nj);
}

TEST(Reelection, AllAboveHalfDoesNotFire) {
  Network net(testkit::star_cluster(4, 6), {});
  for (NodeId i = 1; i <= 4; ++i) set_share(net, i, 0.51);
  EXPECT_FALSE(net.reelect_check(0).has_value());
}

TEST(Reelection, SingletonAtFortyPercentFires) {
  Network net(testkit::star_cluster(1, 3), {});
  set_share(net, 1, 0.40);
  const auto ev = net.reelect_check(0);
  ASSERT_TRUE(ev.has_value());
  EXPECT_EQ(ev->promoted.size(), 1u);
}

TEST(Reelection, NoEligibleReplacementIsDegraded) {
  Network net(testkit::star_cluster(2, 2), {});
  for (NodeId i = 1; i <= 4; ++i) set_share(net, i, 0.3);
  const auto ev = net.reelect_check(0);
  ASSERT_TRUE(ev.has_value());
  EXPECT_TRUE(ev->degraded);
  EXPECT_EQ(net.topology().ids_agents(0), (std::vector<NodeId>{1, 2}));
}

TEST(Reelection, PropertiesOverAgentCountsAndProfiles) {
  const auto failures = testkit::reelection_property_failures(8);
  EXPECT_TRUE(failures.empty()) << failures.size() << " failures, first: " << failures.front();
}

TEST(Export, TopologyAndLedgerCsv) {
  Network net(testkit::star_cluster(2, 1), {});
  net.transmit({1, 0}, 10);
  std::ostringstream topo, ledger;
  net.write_topology_csv(topo);
  net.write_ledger_csv(ledger);
  const auto t = topo.str();
  const auto l = ledger.str();
  EXPECT_EQ(t.substr(0, t.find('\n')), "node_id,role,cluster,x,y,energy_j,isolated,dead");
  EXPECT_EQ(std::count(t.begin(), t.end(), '\n'), 5);
  EXPECT_EQ(std::count(l.begin(), l.end(), '\n'), 3);
}

}  // namespace
