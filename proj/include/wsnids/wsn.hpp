#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wsnids/types.hpp"

namespace wsnids::sim {

enum class Role { Ordinary, IdsAgent, ClusterHead };

std::string_view to_string(Role r);

struct Position {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Position& a, const Position& b);

/// Energy is tracked in integer nanojoules so ledger sums are exact.
struct SensorNode {
  NodeId id = 0;
  Position position;
  Role role = Role::Ordinary;
  std::uint32_t cluster_id = 0;
  std::int64_t energy_nj = 0;
  std::int64_t initial_energy_nj = 0;
  bool isolated = false;
  bool dead = false;

  double energy() const { return static_cast<double>(energy_nj) * 1e-9; }
  double initial_energy() const { return static_cast<double>(initial_energy_nj) * 1e-9; }
  /// Able to send and receive.
  bool active() const { return !isolated && !dead; }
};

struct Cluster {
  std::uint32_t id = 0;
  NodeId head = 0;
  /// Non-head nodes, ascending.
  std::vector<NodeId> members;
};

struct EnergyConfig {
  double tx_uj_per_byte = 50.0;
  double rx_uj_per_byte = 25.0;
  double node_initial_j = 2.0;
  double head_initial_j = 10.0;
  double instructions_per_bit = 900.0;
};

struct Topology {
  std::vector<SensorNode> nodes;  // indexed by node id
  std::vector<Cluster> clusters;  // indexed by cluster id
  double comm_range = 0.0;
  double area = 0.0;

  double density() const { return area > 0 ? static_cast<double>(nodes.size()) / area : 0.0; }
  bool in_range(NodeId a, NodeId b) const;
  std::vector<NodeId> ids_agents(std::uint32_t cluster_id) const;
  std::vector<NodeId> all_ids_agents() const;
};

/// Average IDS count round(1.6 r^2 d), at least 1 for a non-empty network.
std::size_t ids_count(double r, double density);

/// Uniform placement on a square of the given area, heads picked by seeded
/// farthest-point selection, members joined to the nearest head. Throws
/// TopologyError when a node cannot reach its head over range-r hops.
Topology build_topology(std::size_t n_nodes, double area, double r, std::size_t n_clusters,
                        std::uint64_t seed, const EnergyConfig& energy = {});

/// Greedily promotes `n` ordinary nodes to IDS agents, each time picking the
/// node that oversees the most radio links not yet watched by an agent
/// (ties to the lower id). When n covers every cluster, each cluster first
/// gets one agent.
void place_ids(Topology& t, std::size_t n);

enum class Direction { Send, Receive };

struct ChargeRecord {
  std::size_t index = 0;
  NodeId node = 0;
  Direction direction = Direction::Send;
  std::size_t bytes = 0;
  std::int64_t charged_nj = 0;
  bool died = false;
};

struct NodeTotals {
  std::uint64_t bytes_sent = 0;
  std::uint64_t bytes_received = 0;
  std::int64_t spent_nj = 0;
};

class EnergyLedger {
 public:
  explicit EnergyLedger(std::size_t n_nodes = 0) : totals_(n_nodes) {}

  void record(ChargeRecord r);
  const std::vector<ChargeRecord>& events() const noexcept { return events_; }
  const NodeTotals& totals(NodeId node) const { return totals_.at(node); }
  std::int64_t total_spent_nj() const;

 private:
  std::vector<NodeTotals> totals_;
  std::vector<ChargeRecord> events_;
};

/// Outcome of a tripped re-election threshold.
struct Reelection {
  std::uint32_t cluster_id = 0;
  std::vector<NodeId> demoted;
  std::vector<NodeId> promoted;
  /// No node had enough energy to take over; the old agents stay.
  bool degraded = false;
};

/// The simulated network: topology, energy accounting and message routing.
class Network final : public Medium {
 public:
  Network(Topology topology, const EnergyConfig& energy);

  const Topology& topology() const noexcept { return topology_; }
  Topology& topology() noexcept { return topology_; }
  const SensorNode& node(NodeId id) const { return topology_.nodes.at(id); }
  const EnergyLedger& ledger() const noexcept { return ledger_; }
  const EnergyConfig& energy_config() const noexcept { return energy_; }

  /// Deducts the cost of `bytes` from `node`. A node that cannot pay is
  /// drained to zero and marked dead. Throws InvalidInput for isolated nodes.
  void charge(NodeId node, std::size_t bytes, Direction direction);

  /// Direct when in range or when either end is a head; otherwise relayed
  /// through the cluster heads.
  std::vector<Link> route(NodeId from, NodeId to) const override;
  /// Charges both ends of a hop; inactive ends are skipped.
  void transmit(const Link& hop, std::size_t bytes) override;

  void isolate(NodeId node);

  /// Fires when at least ceil(3/4 k) of a cluster's k agents hold less than
  /// half their initial energy. Old agents become ordinary and the same
  /// number of replacements with at least half their energy left are placed
  /// by coverage, ties to higher residual energy.
  std::optional<Reelection> reelect_check(std::uint32_t cluster_id);

  /// Instruction-equivalent cost of a byte count.
  double instruction_equivalents(std::size_t bytes) const {
    return static_cast<double>(bytes) * 8.0 * energy_.instructions_per_bit;
  }

  void write_topology_csv(std::ostream& out) const;
  void write_ledger_csv(std::ostream& out) const;

 private:
  Topology topology_;
  EnergyConfig energy_;
  EnergyLedger ledger_;
};

/// Whether ceil(3/4 k) of the k agents are below half energy.
bool reelection_due(std::span<const SensorNode* const> agents);

}  // namespace wsnids::sim
