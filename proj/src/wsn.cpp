#include "wsnids/wsn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "wsnids/error.hpp"
#include "wsnids/random.hpp"

namespace wsnids::sim {

namespace {

std::int64_t to_nj(double joules) { return std::llround(joules * 1e9); }
std::int64_t per_byte_nj(double microjoules) { return std::llround(microjoules * 1e3); }

bool below_half(const SensorNode& n) { return n.energy_nj * 2 < n.initial_energy_nj; }

/// Radio links between active nodes and which candidate oversees which link.
class Coverage {
 public:
  explicit Coverage(const Topology& t) : t_(t) {
    for (const auto& a : t.nodes) {
      if (!a.active()) continue;
      for (const auto& b : t.nodes) {
        if (b.id <= a.id || !b.active()) continue;
        if (t.in_range(a.id, b.id)) links_.push_back({a.id, b.id});
      }
    }
    covered_.assign(links_.size(), false);
  }

  bool oversees(NodeId w, std::size_t link) const {
    return t_.in_range(w, links_[link].from) && t_.in_range(w, links_[link].to);
  }

  std::size_t gain(NodeId w) const {
    std::size_t g = 0;
    for (std::size_t l = 0; l < links_.size(); ++l) {
      if (!covered_[l] && oversees(w, l)) ++g;
    }
    return g;
  }

  void add_monitor(NodeId w) {
    for (std::size_t l = 0; l < links_.size(); ++l) {
      if (oversees(w, l)) covered_[l] = true;
    }
  }

 private:
  const Topology& t_;
  std::vector<Link> links_;
  std::vector<bool> covered_;
};

/// Highest gain; ties to higher energy when `prefer_energy`, then lower id.
std::optional<NodeId> best_candidate(const Topology& t, const Coverage& cov,
                                     const std::vector<NodeId>& candidates, bool prefer_energy) {
  std::optional<NodeId> best;
  std::size_t best_gain = 0;
  for (auto id : candidates) {
    const std::size_t g = cov.gain(id);
    bool better = !best || g > best_gain;
    if (best && g == best_gain) {
      const auto e = t.nodes[id].energy_nj;
      const auto be = t.nodes[*best].energy_nj;
      better = prefer_energy && e != be ? e > be : id < *best;
    }
    if (better) {
      best = id;
      best_gain = g;
    }
  }
  return best;
}

}  // namespace

std::string_view to_string(Role r) {
  switch (r) {
    case Role::Ordinary:
      return "ordinary";
    case Role::IdsAgent:
      return "ids";
    case Role::ClusterHead:
      return "head";
  }
  return "unknown";
}

double distance(const Position& a, const Position& b) { return std::hypot(a.x - b.x, a.y - b.y); }

bool Topology::in_range(NodeId a, NodeId b) const {
  return distance(nodes.at(a).position, nodes.at(b).position) <= comm_range;
}

std::vector<NodeId> Topology::ids_agents(std::uint32_t cluster_id) const {
  std::vector<NodeId> out;
  for (auto id : clusters.at(cluster_id).members) {
    if (nodes[id].role == Role::IdsAgent) out.push_back(id);
  }
  return out;
}

std::vector<NodeId> Topology::all_ids_agents() const {
  std::vector<NodeId> out;
  for (const auto& n : nodes) {
    if (n.role == Role::IdsAgent) out.push_back(n.id);
  }
  return out;
}

std::size_t ids_count(double r, double density) {
  if (r < 0 || density < 0 || !std::isfinite(r) || !std::isfinite(density)) {
    throw InvalidInput("range and density must be non-negative");
  }
  const auto n = static_cast<std::size_t>(std::llround(1.6 * r * r * density));
  if (r > 0 && density > 0) return std::max<std::size_t>(n, 1);
  return n;
}

Topology build_topology(std::size_t n_nodes, double area, double r, std::size_t n_clusters,
                        std::uint64_t seed, const EnergyConfig& energy) {
  if (!(area > 0)) throw InvalidInput("area must be positive");
  if (r < 0) throw InvalidInput("communication range must be non-negative");
  if (n_nodes == 0) throw InvalidInput("network needs at least one node");
  if (n_clusters == 0 || n_clusters > n_nodes) {
    throw InvalidInput("cluster count must be between 1 and the node count");
  }

  Topology t;
  t.comm_range = r;
  t.area = area;
  const double side = std::sqrt(area);
  rng::Engine e(rng::mix(seed, 0x746f706f));
  for (std::size_t i = 0; i < n_nodes; ++i) {
    SensorNode n;
    n.id = static_cast<NodeId>(i);
    n.position = {rng::uniform(e, 0, side), rng::uniform(e, 0, side)};
    n.energy_nj = n.initial_energy_nj = to_nj(energy.node_initial_j);
    t.nodes.push_back(n);
  }

  std::vector<NodeId> heads{static_cast<NodeId>(rng::index(e, n_nodes))};
  std::vector<double> nearest(n_nodes, std::numeric_limits<double>::infinity());
  while (heads.size() < n_clusters) {
    for (std::size_t i = 0; i < n_nodes; ++i) {
      nearest[i] = std::min(nearest[i], distance(t.nodes[i].position, t.nodes[heads.back()].position));
    }
    std::size_t far = 0;
    for (std::size_t i = 1; i < n_nodes; ++i) {
      if (nearest[i] > nearest[far]) far = i;
    }
    heads.push_back(static_cast<NodeId>(far));
  }

  for (std::size_t c = 0; c < heads.size(); ++c) {
    auto& h = t.nodes[heads[c]];
    h.role = Role::ClusterHead;
    h.cluster_id = static_cast<std::uint32_t>(c);
    h.energy_nj = h.initial_energy_nj = to_nj(energy.head_initial_j);
    t.clusters.push_back({static_cast<std::uint32_t>(c), heads[c], {}});
  }
  for (auto& n : t.nodes) {
    if (n.role == Role::ClusterHead) continue;
    std::size_t best = 0;
    for (std::size_t c = 1; c < heads.size(); ++c) {
      if (distance(n.position, t.nodes[heads[c]].position) <
          distance(n.position, t.nodes[heads[best]].position)) {
        best = c;
      }
    }
    n.cluster_id = static_cast<std::uint32_t>(best);
    t.clusters[best].members.push_back(n.id);
  }

  // Connected components of the range-r graph.
  std::vector<std::size_t> component(n_nodes, n_nodes);
  for (std::size_t s = 0; s < n_nodes; ++s) {
    if (component[s] != n_nodes) continue;
    std::vector<std::size_t> stack{s};
    component[s] = s;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < n_nodes; ++v) {
        if (component[v] == n_nodes && t.in_range(static_cast<NodeId>(u), static_cast<NodeId>(v))) {
          component[v] = s;
          stack.push_back(v);
        }
      }
    }
  }
  for (const auto& c : t.clusters) {
    for (auto m : c.members) {
      if (component[m] != component[c.head]) {
        throw TopologyError("node " + std::to_string(m) + " cannot reach cluster head " +
                            std::to_string(c.head));
      }
    }
  }
  return t;
}

void place_ids(Topology& t, std::size_t n) {
  std::vector<NodeId> candidates;
  for (const auto& node : t.nodes) {
    if (node.role == Role::Ordinary && node.active()) candidates.push_back(node.id);
  }
  if (n == 0 && !t.nodes.empty()) throw InvalidInput("a non-empty network needs at least one IDS agent");
  if (n > candidates.size()) {
    throw InvalidInput("cannot place " + std::to_string(n) + " IDS agents on " +
                       std::to_string(candidates.size()) + " candidate nodes");
  }

  Coverage cov(t);
  for (auto id : t.all_ids_agents()) cov.add_monitor(id);
  auto promote = [&](NodeId id) {
    t.nodes[id].role = Role::IdsAgent;
    cov.add_monitor(id);
    std::erase(candidates, id);
  };

  std::size_t placed = 0;
  if (n >= t.clusters.size()) {
    for (const auto& c : t.clusters) {
      std::vector<NodeId> local;
      for (auto id : candidates) {
        if (t.nodes[id].cluster_id == c.id) local.push_back(id);
      }
      if (auto best = best_candidate(t, cov, local, false)) {
        promote(*best);
        ++placed;
      }
    }
  }
  for (; placed < n; ++placed) promote(*best_candidate(t, cov, candidates, false));
}

void EnergyLedger::record(ChargeRecord r) {
  r.index = events_.size();
  auto& tot = totals_.at(r.node);
  if (r.direction == Direction::Send) {
    tot.bytes_sent += r.bytes;
  } else {
    tot.bytes_received += r.bytes;
  }
  tot.spent_nj += r.charged_nj;
  events_.push_back(r);
}

std::int64_t EnergyLedger::total_spent_nj() const {
  std::int64_t sum = 0;
  for (const auto& t : totals_) sum += t.spent_nj;
  return sum;
}

Network::Network(Topology topology, const EnergyConfig& energy)
    : topology_(std::move(topology)), energy_(energy), ledger_(topology_.nodes.size()) {}

void Network::charge(NodeId node, std::size_t bytes, Direction direction) {
  auto& n = topology_.nodes.at(node);
  if (n.isolated) throw InvalidInput("isolated node " + std::to_string(node) + " cannot communicate");
  if (n.dead || bytes == 0) return;
  const std::int64_t rate =
      per_byte_nj(direction == Direction::Send ? energy_.tx_uj_per_byte : energy_.rx_uj_per_byte);
  std::int64_t cost = rate * static_cast<std::int64_t>(bytes);
  bool died = false;
  if (cost >= n.energy_nj && cost > 0) {
    cost = n.energy_nj;
    died = true;
  }
  n.energy_nj -= cost;
  if (died) n.dead = true;
  ledger_.record({0, node, direction, bytes, cost, died});
}

std::vector<Link> Network::route(NodeId from, NodeId to) const {
  const auto& a = node(from);
  const auto& b = node(to);
  if (from == to) return {};
  if (a.role == Role::ClusterHead || b.role == Role::ClusterHead || topology_.in_range(from, to)) {
    return {{from, to}};
  }
  // Member-to-head legs are treated as single hops.
  const NodeId ha = topology_.clusters.at(a.cluster_id).head;
  const NodeId hb = topology_.clusters.at(b.cluster_id).head;
  std::vector<Link> hops{{from, ha}};
  if (ha != hb) hops.push_back({ha, hb});
  hops.push_back({hb, to});
  return hops;
}

void Network::transmit(const Link& hop, std::size_t bytes) {
  if (node(hop.from).active()) charge(hop.from, bytes, Direction::Send);
  if (node(hop.to).active()) charge(hop.to, bytes, Direction::Receive);
}

void Network::isolate(NodeId node) { topology_.nodes.at(node).isolated = true; }

bool reelection_due(std::span<const SensorNode* const> agents) {
  if (agents.empty()) return false;
  const std::size_t k = agents.size();
  const std::size_t threshold = (3 * k + 3) / 4;
  const auto low = static_cast<std::size_t>(
      std::count_if(agents.begin(), agents.end(), [](const SensorNode* n) { return below_half(*n); }));
  return low >= threshold;
}

std::optional<Reelection> Network::reelect_check(std::uint32_t cluster_id) {
  auto& t = topology_;
  const auto old = t.ids_agents(cluster_id);
  if (old.empty()) throw InvalidInput("cluster " + std::to_string(cluster_id) + " has no IDS agents");
  std::vector<const SensorNode*> agents;
  for (auto id : old) agents.push_back(&t.nodes[id]);
  if (!reelection_due(agents)) return std::nullopt;

  Reelection ev;
  ev.cluster_id = cluster_id;
  std::vector<NodeId> eligible;
  for (auto id : t.clusters.at(cluster_id).members) {
    const auto& n = t.nodes[id];
    if (n.role == Role::Ordinary && n.active() && !below_half(n)) eligible.push_back(id);
  }
  if (eligible.empty()) {
    ev.degraded = true;
    return ev;
  }

  for (auto id : old) t.nodes[id].role = Role::Ordinary;
  ev.demoted = old;
  Coverage cov(t);
  for (auto id : t.all_ids_agents()) cov.add_monitor(id);
  const std::size_t want = std::min(old.size(), eligible.size());
  while (ev.promoted.size() < want) {
    const NodeId id = *best_candidate(t, cov, eligible, true);
    t.nodes[id].role = Role::IdsAgent;
    cov.add_monitor(id);
    std::erase(eligible, id);
    ev.promoted.push_back(id);
  }
  std::sort(ev.promoted.begin(), ev.promoted.end());
  return ev;
}

void Network::write_topology_csv(std::ostream& out) const {
  out << "node_id,role,cluster,x,y,energy_j,isolated,dead\n";
  for (const auto& n : topology_.nodes) {
    out << n.id << ',' << to_string(n.role) << ',' << n.cluster_id << ',' << n.position.x << ','
        << n.position.y << ',' << n.energy() << ',' << (n.isolated ? 1 : 0) << ',' << (n.dead ? 1 : 0)
        << '\n';
  }
}

void Network::write_ledger_csv(std::ostream& out) const {
  out << "event,node,direction,bytes,joules,instruction_equivalents,died\n";
  for (const auto& r : ledger_.events()) {
    out << r.index << ',' << r.node << ',' << (r.direction == Direction::Send ? "send" : "receive")
        << ',' << r.bytes << ',' << static_cast<double>(r.charged_nj) * 1e-9 << ','
        << instruction_equivalents(r.bytes) << ',' << (r.died ? 1 : 0) << '\n';
  }
}

}  // namespace wsnids::sim
