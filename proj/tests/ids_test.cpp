#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "corpus.hpp"
#include "properties.hpp"
#include "wsnids/dist_svm.hpp"
#include "wsnids/error.hpp"
#include "wsnids/ids.hpp"

namespace {

using namespace wsnids;
using namespace wsnids::ids;

sim::SensorNode make_node(NodeId id, double x, double y, sim::Role role, std::uint32_t cluster) {
  sim::SensorNode n;
  n.id = id;
  n.position = {x, y};
  n.role = role;
  n.cluster_id = cluster;
  const double j = role == sim::Role::ClusterHead ? 10.0 : 2.0;
  n.initial_energy_nj = n.energy_nj = std::llround(j * 1e9);
  return n;
}

// Cluster 0: head 0, agents 1 and 2, ordinary 3. Cluster 1: head 4, agents 5 and 6.
sim::Topology two_clusters() {
  sim::Topology t;
  t.comm_range = 20;
  t.area = 10000;
  t.nodes = {make_node(0, 0, 0, sim::Role::ClusterHead, 0), make_node(1, 5, 0, sim::Role::IdsAgent, 0),
             make_node(2, 0, 5, sim::Role::IdsAgent, 0),    make_node(3, 5, 5, sim::Role::Ordinary, 0),
             make_node(4, 50, 0, sim::Role::ClusterHead, 1), make_node(5, 55, 0, sim::Role::IdsAgent, 1),
             make_node(6, 50, 5, sim::Role::IdsAgent, 1)};
  t.clusters = {{0, 0, {1, 2, 3}}, {1, 4, {5, 6}}};
  return t;
}

const data::Normalization kUnit({{0.0, 1.0}});

Signature sig(SignatureId id, FeatureVector c, double r) {
  return {id, std::move(c), r, SignatureOrigin::Predefined, std::nullopt};
}

IntrusionReport report_on(NodeId suspect, FeatureVector x, NodeId reporter = 1) {
  return {reporter, suspect, std::move(x), -1.0, 0};
}

TEST(Collect, RangeBoundaryAndIsolation) {
  sim::Topology t;
  t.comm_range = 10;
  t.area = 10000;
  t.nodes = {make_node(0, 0, 50, sim::Role::ClusterHead, 0), make_node(1, 0, 0, sim::Role::IdsAgent, 0),
             make_node(2, 10 - 1e-9, 0, sim::Role::Ordinary, 0), make_node(3, 10 + 1e-9, 0, sim::Role::Ordinary, 0),
             make_node(4, 1, 0, sim::Role::Ordinary, 0)};
  t.clusters = {{0, 0, {1, 2, 3, 4}}};
  sim::Network net(t, {});
  net.isolate(4);
  Deployment dep(net, kUnit);
  dep.initialize({});
  const std::vector<TrafficEvent> events{{2, {{0.2}, 1, 0}}, {3, {{0.3}, 1, 1}}, {4, {{0.4}, 1, 2}}, {1, {{0.5}, 1, 3}}};
  const auto obs = dep.collect(1, events);
  ASSERT_EQ(obs.size(), 1u);
  EXPECT_EQ(obs[0].source, 2u);
  EXPECT_EQ(obs[0].features, FeatureVector{0.2});
}

TEST(Collect, AppliesStoredNormalization) {
  sim::Network net(two_clusters(), {});
  Deployment dep(net, data::Normalization({{10.0, 20.0}}));
  dep.initialize({});
  const std::vector<TrafficEvent> events{{3, {{15.0}, 1, 0}}, {2, {{30.0}, 1, 1}}};
  const auto obs = dep.collect(1, events);
  ASSERT_EQ(obs.size(), 2u);
  EXPECT_EQ(obs[0].features, FeatureVector{0.5});
  EXPECT_EQ(obs[1].features, FeatureVector{1.0});
}

TEST(AnomalyCheck, TrainingNormalsPassOnConvergedModel) {
  const auto& ds = testkit::default_dataset();
  const data::SamplingPlan plan(ds, 1);
  std::vector<std::pair<NodeId, std::vector<Sample>>> agents;
  std::vector<Sample> pooled;
  for (NodeId a = 0; a < 6; ++a) {
    auto d = plan.training(a, 50, 50);
    pooled.insert(pooled.end(), d.begin(), d.end());
    agents.emplace_back(a, std::move(d));
  }
  const auto norm = data::Normalization::fit(pooled);
  for (auto& [_, d] : agents) d = norm.apply(d);
  dist::ProtocolConfig cfg;
  cfg.svm.c = 1000;
  cfg.svm.kernel.sigma = 0.4;
  DirectMedium m;
  const auto result = dist::run_protocol({{0, 100, agents}}, [](NodeId) { return 1.0; }, m, cfg);
  NodeState state(0);
  state.install_model(result.model());
  std::size_t normals = 0, passed = 0;
  for (const auto& [_, d] : agents) {
    for (const auto& s : d) {
      if (s.y < 0) continue;
      ++normals;
      passed += std::holds_alternative<Normal>(state.anomaly_check(s.x));
    }
  }
  EXPECT_GE(passed * 100, normals * 95) << passed << " of " << normals;
}

TEST(AnomalyCheck, TieIsNormalAndUntrainedAgentRejected) {
  const std::vector<Sample> data{{{1.0}, 1, 0}, {{-1.0}, -1, 1}};
  svm::TrainOptions o;
  o.c = 1;
  NodeState state(1);
  EXPECT_THROW(state.anomaly_check(std::vector<double>{0.0}), AgentNotReady);
  state.install_model(svm::train(data, o));
  ASSERT_EQ(state.model().decision_value(std::vector<double>{0.0}), 0.0);
  EXPECT_TRUE(std::holds_alternative<Normal>(state.anomaly_check(std::vector<double>{0.0})));
  EXPECT_TRUE(std::holds_alternative<Suspect>(state.anomaly_check(std::vector<double>{-1.0})));
}

TEST(MisuseCheck, CentroidMatchesEmptyDbDoesNot) {
  SignatureDb db;
  EXPECT_FALSE(misuse_check(db, report_on(3, {0.2, 0.3})).has_value());
  db.add(sig(7, {0.2, 0.3}, 0.1));
  EXPECT_EQ(misuse_check(db, report_on(3, {0.2, 0.3})), 7u);
  EXPECT_FALSE(misuse_check(db, report_on(3, {0.5, 0.3})).has_value());
}

TEST(MisuseCheck, EquidistantGoesToLowerIdAndNearestWins) {
  SignatureDb db;
  db.add(sig(9, {0.0, 0.0}, 1.0));
  db.add(sig(4, {1.0, 0.0}, 1.0));
  EXPECT_EQ(misuse_check(db, report_on(3, {0.5, 0.0})), 4u);
  EXPECT_EQ(misuse_check(db, report_on(3, {0.2, 0.0})), 9u);
}

TEST(PredefinedSignatures, CentroidAndNinetiethPercentile) {
  std::vector<Sample> samples;
  std::vector<data::Category> cats;
  for (int i = 0; i < 10; ++i) {
    samples.push_back({{static_cast<double>(i)}, -1, SampleId(i)});
    cats.push_back(data::Category::Dos);
  }
  samples.push_back({{100.0}, 1, 99});
  cats.push_back(data::Category::Normal);
  const auto sigs = predefined_signatures(samples, cats);
  ASSERT_EQ(sigs.size(), 1u);
  EXPECT_EQ(sigs[0].centroid, FeatureVector{4.5});
  // Distances 0.5 0.5 1.5 1.5 2.5 2.5 3.5 3.5 4.5 4.5: the 9th of 10 is 4.5.
  EXPECT_DOUBLE_EQ(sigs[0].radius, 4.5);
  EXPECT_EQ(sigs[0].attack_hint, data::Category::Dos);
  EXPECT_EQ(sigs[0].origin, SignatureOrigin::Predefined);
}

TEST(DeriveSignature, SingleReportUsesFloor) {
  const std::vector<IntrusionReport> r{report_on(3, {0.3, 0.7})};
  const auto s = derive_signature(r, 1);
  EXPECT_EQ(s.centroid, (FeatureVector{0.3, 0.7}));
  EXPECT_EQ(s.radius, kMinSignatureRadius);
  EXPECT_EQ(s.origin, SignatureOrigin::Learned);
}

TEST(DeriveSignature, TwoReportsMidpoint) {
  const std::vector<IntrusionReport> r{report_on(3, {0.1, 0.5}), report_on(3, {0.5, 0.5})};
  const auto s = derive_signature(r, 1);
  EXPECT_NEAR(s.centroid[0], 0.3, 1e-15);
  EXPECT_NEAR(s.radius, 0.2, 1e-15);
}

TEST(DeriveSignature, ClosureOverContributingReports) {
  const std::vector<IntrusionReport> r{report_on(3, {0.1, 0.2}), report_on(3, {0.4, 0.9}),
                                       report_on(3, {0.7, 0.1})};
  SignatureDb db;
  db.add(derive_signature(r, 5));
  for (const auto& x : r) EXPECT_EQ(misuse_check(db, x), 5u);
  EXPECT_EQ(misuse_check(db, report_on(3, db.signatures()[0].centroid)), 5u);
  EXPECT_THROW(derive_signature(std::vector<IntrusionReport>{}, 1), InvalidInput);
}

TEST(ApplyAlert, IdempotentAndVersioned) {
  NodeState n(1);
  Alert with{3, sig(11, {0.5}, 0.1), 0};
  EXPECT_TRUE(n.apply_alert(with));
  EXPECT_FALSE(n.apply_alert(with));
  EXPECT_EQ(n.db().version(), 1u);
  EXPECT_TRUE(n.considers_isolated(3));
  Alert without{4, std::nullopt, 0};
  EXPECT_TRUE(n.apply_alert(without));
  EXPECT_EQ(n.db().version(), 1u);
  EXPECT_TRUE(n.considers_isolated(4));
}

TEST(SignatureDb, VersionCountsAcceptedUpdates) {
  SignatureDb db;
  EXPECT_TRUE(db.add(sig(1, {0.0}, 0.1)));
  EXPECT_FALSE(db.add(sig(1, {0.5}, 0.1)));
  EXPECT_TRUE(db.add(sig(2, {0.5}, 0.1)));
  EXPECT_EQ(db.version(), 2u);
}

TEST(ReportMatched, IsolatesAndAlertsEveryHead) {
  sim::Network net(two_clusters(), {});
  Deployment dep(net, kUnit);
  dep.initialize(std::vector<Signature>{sig(0, {0.9}, 0.2)});
  const auto before = dep.agent(5).db().version();
  dep.report_matched(1, report_on(3, {0.9}), 0);
  EXPECT_TRUE(net.node(3).isolated);
  for (NodeId id : {1u, 2u, 5u, 6u}) {
    EXPECT_TRUE(dep.agent(id).considers_isolated(3)) << id;
    EXPECT_EQ(dep.agent(id).db().version(), before);
  }
  EXPECT_TRUE(dep.head(4).considers_isolated(3));
  const auto applied = dep.log().count(EventType::AlertApplied);
  dep.report_matched(2, report_on(3, {0.9}, 2), 0);
  EXPECT_EQ(dep.log().count(EventType::AlertApplied), applied);
  EXPECT_EQ(dep.log().count(EventType::Isolation), 1u);
  EXPECT_TRUE(testkit::audit_verdicts(dep.log()).empty());
}

TEST(ReportMatched, DeadHeadIsUndeliverable) {
  auto t = two_clusters();
  t.nodes[0].dead = true;
  sim::Network net(t, {});
  Deployment dep(net, kUnit);
  dep.initialize({});
  dep.report_matched(1, report_on(3, {0.9}), 0);
  EXPECT_FALSE(net.node(3).isolated);
  EXPECT_EQ(dep.log().count(EventType::AlertUndeliverable), 1u);
}

TEST(ReportMatched, DeadRemoteHeadLogged) {
  auto t = two_clusters();
  t.nodes[4].dead = true;
  sim::Network net(t, {});
  Deployment dep(net, kUnit);
  dep.initialize({});
  dep.report_matched(1, report_on(3, {0.9}), 0);
  EXPECT_TRUE(net.node(3).isolated);
  EXPECT_EQ(dep.log().count(EventType::AlertUndeliverable), 1u);
  EXPECT_FALSE(dep.agent(5).considers_isolated(3));
}

// A cluster of `k` agents where the first `yes` saw intruder-like traffic
// from the suspect, the next `no` saw normal traffic and the rest saw none.
struct Poll {
  sim::Network net;
  Deployment dep;
  NodeId suspect;

  Poll(std::size_t k, std::size_t yes, std::size_t no)
      : net(testkit::star_cluster(k, 1), {}), dep(net, kUnit), suspect(static_cast<NodeId>(k + 1)) {
    dep.initialize({});
    dep.install_model(testkit::threshold_model());
    for (std::size_t a = 0; a < k; ++a) {
      const NodeId id = static_cast<NodeId>(a + 1);
      if (a < yes) dep.agent(id).observe(suspect, {1.0});
      else if (a < yes + no) dep.agent(id).observe(suspect, {0.0});
    }
  }
  Verdict run() { return dep.cooperate(0, report_on(suspect, {1.0})); }
};

TEST(Cooperate, FourOfSixIsIntruder) {
  Poll p(6, 4, 2);
  EXPECT_EQ(p.run(), Verdict::Intruder);
  EXPECT_TRUE(p.net.node(p.suspect).isolated);
  EXPECT_EQ(p.dep.signatures_learned(), 1u);
  // Every agent now holds the learned signature.
  for (NodeId id = 1; id <= 6; ++id) EXPECT_EQ(p.dep.agent(id).db().version(), p.dep.head(0).db().version());
  EXPECT_EQ(p.dep.head(0).db().signatures().back().origin, SignatureOrigin::Learned);
}

TEST(Cooperate, ThreeOfSixIsBenign) {
  Poll p(6, 3, 3);
  EXPECT_EQ(p.run(), Verdict::Benign);
  EXPECT_FALSE(p.net.node(p.suspect).isolated);
  EXPECT_EQ(p.dep.signatures_learned(), 0u);
}

TEST(Cooperate, AbstentionsCountInDenominator) {
  Poll p(5, 3, 0);
  EXPECT_EQ(p.run(), Verdict::Intruder);
  Poll q(5, 2, 0);
  EXPECT_EQ(q.run(), Verdict::Benign);
  EXPECT_EQ(q.dep.log().count(EventType::VoteCast), 5u);
}

TEST(Cooperate, NoActiveAgentsIsProtocolError) {
  Poll p(2, 1, 1);
  p.net.isolate(1);
  p.net.isolate(2);
  EXPECT_THROW(p.run(), ProtocolError);
}

TEST(Voting, ExhaustiveStrictMajority) {
  const auto failures = testkit::voting_property_failures(9);
  EXPECT_TRUE(failures.empty()) << failures.size() << " failures, first: " << failures.front();
}

TEST(Tally, ExamplesAndEmptyPoll) {
  using V = Vote;
  EXPECT_EQ(tally(std::vector<V>{V::Intruder, V::Intruder, V::Intruder, V::Intruder, V::Benign, V::Benign}),
            Verdict::Intruder);
  EXPECT_EQ(tally(std::vector<V>{V::Intruder, V::Intruder, V::Intruder, V::Benign, V::Benign, V::Benign}),
            Verdict::Benign);
  EXPECT_EQ(tally(std::vector<V>{V::Intruder, V::Intruder, V::Intruder, V::Abstain, V::Abstain}), Verdict::Intruder);
  EXPECT_THROW(tally(std::vector<V>{}), ProtocolError);
}

TEST(ProcessTick, ReportsReachHeadOnNextTick) {
  sim::Network net(two_clusters(), {});
  Deployment dep(net, kUnit);
  dep.initialize(std::vector<Signature>{sig(0, {1.0}, 0.1)});
  dep.install_model(testkit::threshold_model());
  const std::vector<TrafficEvent> attack{{3, {{1.0}, -1, 0}}};
  const auto counts = dep.process_tick(attack);
  EXPECT_EQ(counts.true_positive, 1u);
  EXPECT_EQ(dep.log().count(EventType::MisuseMatch), 2u);  // agents 1 and 2 both see node 3
  EXPECT_FALSE(net.node(3).isolated);
  dep.flush();
  EXPECT_TRUE(net.node(3).isolated);
  EXPECT_EQ(dep.log().count(EventType::Isolation), 1u);
  EXPECT_EQ(dep.log().count(EventType::Alarm), 1u);
}

TEST(ProcessTick, UnmatchedReportGoesToVote) {
  sim::Network net(two_clusters(), {});
  Deployment dep(net, kUnit);
  dep.initialize({});
  dep.install_model(testkit::threshold_model());
  const std::vector<TrafficEvent> attack{{3, {{1.0}, -1, 0}}};
  dep.process_tick(attack);
  dep.flush();
  EXPECT_EQ(dep.log().count(EventType::Poll), 1u);
  EXPECT_TRUE(net.node(3).isolated);
  EXPECT_EQ(dep.signatures_learned(), 1u);
  // The learned signature now matches the traffic that produced it.
  for (auto id : dep.agent_ids()) {
    EXPECT_TRUE(misuse_check(dep.agent(id).db(), report_on(3, {1.0})).has_value());
    EXPECT_EQ(dep.agent(id).db().version(), dep.head(0).db().version());
  }
  EXPECT_TRUE(testkit::audit_verdicts(dep.log()).empty());
}

TEST(ProcessTick, NormalTrafficRaisesNothing) {
  sim::Network net(two_clusters(), {});
  Deployment dep(net, kUnit);
  dep.initialize({});
  dep.install_model(testkit::threshold_model());
  const std::vector<TrafficEvent> calm{{3, {{0.0}, 1, 0}}, {6, {{0.1}, 1, 1}}};
  const auto counts = dep.process_tick(calm);
  dep.flush();
  EXPECT_EQ(counts.true_negative, 2u);
  EXPECT_EQ(dep.log().count(EventType::Anomaly), 0u);
  EXPECT_TRUE(dep.isolated().empty());
}

TEST(HandleReelection, NewAgentsReceiveHeadSignatures) {
  sim::Network net(testkit::star_cluster(2, 4), {});
  Deployment dep(net, kUnit);
  dep.initialize(std::vector<Signature>{sig(0, {0.9}, 0.1)});
  dep.head(0).db().add(sig(77, {0.2}, 0.1));
  for (NodeId id : {1u, 2u}) {
    auto& n = net.topology().nodes[id];
    n.energy_nj = n.initial_energy_nj / 4;
  }
  const auto ev = net.reelect_check(0);
  ASSERT_TRUE(ev && !ev->degraded);
  dep.handle_reelection(*ev);
  for (auto id : ev->promoted) {
    EXPECT_EQ(dep.agent(id).db(), dep.head(0).db());
    EXPECT_EQ(dep.agent(id).db().version(), 2u);
  }
  EXPECT_FALSE(dep.has_agent(1));
  EXPECT_EQ(dep.log().count(EventType::Handover), ev->promoted.size());
}

TEST(EventLog, CsvShape) {
  EventLog log;
  log.append(EventType::Poll, 0, 3, "2");
  log.append(EventType::VoteCast, 1, 3, "intruder");
  log.append(EventType::AlertApplied, 1, 3, "", 4);
  std::ostringstream out;
  log.write_csv(out);
  EXPECT_EQ(out.str(),
            "event,type,actor,suspect,verdict,db_version\n"
            "0,poll,0,3,2,\n"
            "1,vote,1,3,intruder,\n"
            "2,alert_applied,1,3,,4\n");
}

}  // namespace
