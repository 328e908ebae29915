#include "properties.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "wsnids/error.hpp"
#include "wsnids/random.hpp"

namespace wsnids::testkit {

using ids::EventType;

sim::Topology star_cluster(std::size_t n_agents, std::size_t n_ordinary, const sim::EnergyConfig& energy) {
  sim::Topology t;
  t.comm_range = 100.0;
  t.area = 400.0 * 400.0;
  const std::size_t n = 1 + n_agents + n_ordinary;
  sim::Cluster c;
  c.id = 0;
  c.head = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sim::SensorNode node;
    node.id = static_cast<NodeId>(i);
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    node.position = i == 0 ? sim::Position{} : sim::Position{10.0 * std::cos(angle), 10.0 * std::sin(angle)};
    const bool head = i == 0;
    node.role = head ? sim::Role::ClusterHead : (i <= n_agents ? sim::Role::IdsAgent : sim::Role::Ordinary);
    const double joules = head ? energy.head_initial_j : energy.node_initial_j;
    node.initial_energy_nj = node.energy_nj = std::llround(joules * 1e9);
    t.nodes.push_back(node);
    if (!head) c.members.push_back(node.id);
  }
  t.clusters.push_back(c);
  return t;
}

svm::SvmModel threshold_model() {
  const std::vector<Sample> data{{{0.0}, 1, 0}, {{1.0}, -1, 1}};
  svm::TrainOptions o;
  o.c = 10.0;
  o.kernel.sigma = 0.3;
  return svm::train(data, o);
}

std::vector<std::string> audit_verdicts(const ids::EventLog& log) {
  std::vector<std::string> out;
  const auto& ev = log.events();
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (ev[i].type != EventType::Poll) continue;
    const std::size_t polled = std::stoul(ev[i].verdict);
    std::vector<ids::Vote> votes;
    std::size_t j = i + 1;
    for (; j < ev.size() && ev[j].type != EventType::VerdictReached; ++j) {
      if (ev[j].type != EventType::VoteCast || ev[j].suspect != ev[i].suspect) continue;
      if (ev[j].verdict == "intruder") votes.push_back(ids::Vote::Intruder);
      else if (ev[j].verdict == "benign") votes.push_back(ids::Vote::Benign);
      else votes.push_back(ids::Vote::Abstain);
    }
    std::ostringstream where;
    where << "poll at event " << ev[i].index;
    if (j == ev.size()) {
      out.push_back(where.str() + ": no verdict logged");
      continue;
    }
    if (votes.size() != polled) {
      out.push_back(where.str() + ": " + std::to_string(votes.size()) + " votes for " +
                    std::to_string(polled) + " polled agents");
    }
    const std::size_t intruder = std::count(votes.begin(), votes.end(), ids::Vote::Intruder);
    const std::string expect = 2 * intruder > votes.size() ? "intruder" : "benign";
    if (ev[j].verdict != expect) out.push_back(where.str() + ": logged " + ev[j].verdict + ", votes give " + expect);
  }
  return out;
}

std::vector<std::string> voting_property_failures(std::size_t max_cluster) {
  std::vector<std::string> out;
  const auto model = threshold_model();
  const data::Normalization norm({{0.0, 1.0}});
  for (std::size_t k = 1; k <= max_cluster; ++k) {
    for (std::size_t yes = 0; yes <= k; ++yes) {
      for (std::size_t no = 0; yes + no <= k; ++no) {
        const std::size_t abstain = k - yes - no;
        const bool intruder = 2 * yes > k;
        std::ostringstream tag;
        tag << "k=" << k << " intruder=" << yes << " benign=" << no << " abstain=" << abstain;

        std::vector<ids::Vote> votes;
        votes.insert(votes.end(), yes, ids::Vote::Intruder);
        votes.insert(votes.end(), no, ids::Vote::Benign);
        votes.insert(votes.end(), abstain, ids::Vote::Abstain);
        // Every ordering gives the same verdict.
        std::sort(votes.begin(), votes.end());
        do {
          const auto v = ids::tally(votes);
          if ((v == ids::Verdict::Intruder) != intruder) {
            out.push_back(tag.str() + ": tally disagrees with the strict majority");
            break;
          }
        } while (std::next_permutation(votes.begin(), votes.end()));

        // The same tally reached by a head polling agents on their own observations.
        sim::Network net(star_cluster(k, 1), {});
        const NodeId suspect = static_cast<NodeId>(k + 1);
        ids::Deployment dep(net, norm);
        dep.initialize({});
        dep.install_model(model);
        for (std::size_t a = 0; a < k; ++a) {
          const NodeId id = static_cast<NodeId>(a + 1);
          if (a < yes) dep.agent(id).observe(suspect, {1.0});
          else if (a < yes + no) dep.agent(id).observe(suspect, {0.0});
        }
        ids::IntrusionReport report{1, suspect, {1.0}, -1.0, 0};
        const auto verdict = dep.cooperate(0, report);
        if ((verdict == ids::Verdict::Intruder) != intruder) out.push_back(tag.str() + ": cooperate verdict wrong");
        if (net.node(suspect).isolated != intruder) out.push_back(tag.str() + ": isolation does not follow verdict");
        if (2 * yes == k && net.node(suspect).isolated) out.push_back(tag.str() + ": tie isolated the suspect");
        if (dep.log().count(EventType::VoteCast) != k) out.push_back(tag.str() + ": not every agent was polled");
        for (const auto& f : audit_verdicts(dep.log())) out.push_back(tag.str() + ": " + f);
      }
    }
  }
  try {
    ids::tally(std::vector<ids::Vote>{});
    out.push_back("empty poll did not raise");
  } catch (const ProtocolError&) {
  }
  return out;
}

namespace {

bool below_half(const sim::SensorNode& n) { return 2 * n.energy_nj < n.initial_energy_nj; }

std::int64_t at_share(const sim::SensorNode& n, double share) {
  return std::llround(static_cast<double>(n.initial_energy_nj) * share);
}

}  // namespace

std::vector<std::string> reelection_property_failures(std::size_t max_agents) {
  std::vector<std::string> out;
  const std::vector<double> low_shares{0.0, 0.1, 0.4, 0.49, 0.4999};
  const std::vector<double> high_shares{0.5, 0.51, 0.8, 1.0};
  rng::Engine e(2024);

  for (std::size_t k = 1; k <= max_agents; ++k) {
    const std::size_t threshold = (3 * k + 3) / 4;
    for (std::size_t low = 0; low <= k; ++low) {
      // Replacement pools: none eligible, fewer than k eligible, plenty eligible.
      for (std::size_t eligible : {std::size_t{0}, k / 2, k + 2}) {
        for (int variant = 0; variant < 3; ++variant) {
          const std::size_t n_ordinary = k + 3;
          sim::Network net(star_cluster(k, n_ordinary), {});
          auto& nodes = net.topology().nodes;
          for (std::size_t a = 0; a < k; ++a) {
            auto& n = nodes[a + 1];
            const double share = a < low ? low_shares[rng::index(e, low_shares.size())]
                                         : high_shares[rng::index(e, high_shares.size())];
            n.energy_nj = at_share(n, share);
          }
          for (std::size_t o = 0; o < n_ordinary; ++o) {
            auto& n = nodes[k + 1 + o];
            n.energy_nj = o < eligible ? at_share(n, rng::uniform(e, 0.5, 1.0))
                                       : at_share(n, rng::uniform(e, 0.0, 0.4999));
          }

          std::ostringstream tag;
          tag << "k=" << k << " low=" << low << " eligible=" << std::min(eligible, n_ordinary)
              << " variant=" << variant;

          ids::Deployment dep(net, data::Normalization({{0.0, 1.0}}));
          dep.initialize({});
          // Give the head a signature history so handover has something to carry.
          for (int s = 0; s <= variant; ++s) {
            dep.head(0).db().add({static_cast<ids::SignatureId>(100 + s), {0.5}, 0.1, ids::SignatureOrigin::Learned, {}});
          }

          const auto old = net.topology().ids_agents(0);
          const auto ev = net.reelect_check(0);
          const bool should_fire = low >= threshold;
          if (ev.has_value() != should_fire) {
            out.push_back(tag.str() + ": trigger " + (ev ? "fired" : "did not fire"));
            continue;
          }
          if (!ev) continue;
          dep.handle_reelection(*ev);
          if (ev->degraded) {
            if (eligible != 0) out.push_back(tag.str() + ": degraded with eligible replacements");
            if (net.topology().ids_agents(0) != old) out.push_back(tag.str() + ": degraded run changed agents");
            if (dep.log().count(EventType::ReelectionDegraded) != 1) out.push_back(tag.str() + ": no degraded event");
            continue;
          }
          if (ev->demoted != old) out.push_back(tag.str() + ": not every old agent demoted");
          if (ev->promoted.size() != std::min(k, eligible)) out.push_back(tag.str() + ": wrong replacement count");
          const auto now = net.topology().ids_agents(0);
          if (now != ev->promoted) out.push_back(tag.str() + ": agent set differs from promoted list");
          for (auto id : now) {
            if (below_half(net.node(id))) out.push_back(tag.str() + ": new agent " + std::to_string(id) + " below half");
            if (std::find(old.begin(), old.end(), id) != old.end()) out.push_back(tag.str() + ": old agent re-promoted");
            if (!dep.has_agent(id)) {
              out.push_back(tag.str() + ": new agent has no detection state");
            } else if (dep.agent(id).db().version() != dep.head(0).db().version() ||
                       dep.agent(id).db() != dep.head(0).db()) {
              out.push_back(tag.str() + ": signature handover mismatch");
            }
          }
          for (auto id : old) {
            if (dep.has_agent(id)) out.push_back(tag.str() + ": demoted agent still holds state");
          }
        }
      }
    }
  }
  return out;
}

}  // namespace wsnids::testkit
