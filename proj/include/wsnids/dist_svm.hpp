#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "wsnids/svm.hpp"
#include "wsnids/types.hpp"

namespace wsnids::dist {

/// Byte cost of shipping samples: a fixed header per message plus, per
/// sample, `bytes_per_feature` for each feature and `label_bytes`.
struct WireFormat {
  std::size_t bytes_per_feature = 4;
  std::size_t label_bytes = 1;
  std::size_t header_bytes = 8;
  std::size_t id_bytes = 4;

  std::size_t message_bytes(std::size_t n_samples, std::size_t dimension) const {
    return header_bytes + n_samples * (dimension * bytes_per_feature + label_bytes);
  }
  /// A list of sample ids without their features.
  std::size_t id_list_bytes(std::size_t n_ids) const { return header_bytes + n_ids * id_bytes; }
};

struct ProtocolConfig {
  svm::TrainOptions svm;
  WireFormat wire;
  std::size_t max_passes = 20;
  /// Hops from an agent to the base station in the centralized baseline:
  /// agent to its head, head to the station.
  std::size_t base_station_hops = 2;
};

/// Samples keyed by identity, kept sorted by id so that training on the same
/// set always sees the same input order.
class SupportVectorSet {
 public:
  SupportVectorSet() = default;
  explicit SupportVectorSet(std::vector<Sample> vectors);

  const std::vector<Sample>& vectors() const noexcept { return vectors_; }
  std::size_t size() const noexcept { return vectors_.size(); }
  bool empty() const noexcept { return vectors_.empty(); }
  bool contains(SampleId id) const;
  std::set<SampleId> ids() const;

  /// Union by identity; on duplicate ids the left operand's copy is kept.
  static SupportVectorSet unite(const SupportVectorSet& a, const SupportVectorSet& b);

  friend bool operator==(const SupportVectorSet& a, const SupportVectorSet& b) {
    return a.ids() == b.ids();
  }

 private:
  std::vector<Sample> vectors_;
};

struct LocalModel {
  svm::SvmModel model;
  SupportVectorSet support_vectors;
};

LocalModel local_train(std::span<const Sample> agent_data, const ProtocolConfig& cfg);

/// Retrains on the union of `own` and `received`.
LocalModel merge_and_retrain(const SupportVectorSet& own, const SupportVectorSet& received,
                             const ProtocolConfig& cfg);

/// One IDS agent's training state within a session.
struct AgentState {
  NodeId id = 0;
  std::vector<Sample> data;
  std::optional<svm::SvmModel> model;
  SupportVectorSet support_vectors;
  /// Ids this agent has sent in the session and still holds as support vectors.
  std::set<SampleId> transmitted;
};

/// The support vectors in `new_svs` that `agent` has not transmitted yet. The
/// returned vectors are recorded as transmitted.
std::vector<Sample> delta_payload(AgentState& agent, const SupportVectorSet& new_svs);

/// Replaces an agent's model and support vectors; vectors that left the
/// support set are forgotten from its transmission record so they are sent
/// again if they re-enter.
void adopt(AgentState& agent, LocalModel local);

/// Intra-cluster training of one cluster's IDS agents.
struct TrainingSession {
  std::uint32_t cluster_id = 0;
  NodeId head = 0;
  /// Ring order: ascending node id.
  std::vector<AgentState> agents;
  /// Passes that transmitted at least one vector.
  std::size_t rounds = 0;
  /// Passes executed, including the final quiet one.
  std::size_t passes = 0;
  /// Quiet passes that ended with unequal support sets and needed an agreement lap.
  std::size_t agreement_laps = 0;
  bool converged = false;
  std::map<Link, std::uint64_t> link_bytes;
  std::uint64_t vectors_sent = 0;

  const AgentState& agent(NodeId id) const;
  AgentState& agent(NodeId id);
};

/// Builds a session with every participant locally trained.
TrainingSession open_session(std::uint32_t cluster_id, NodeId head,
                             std::vector<std::pair<NodeId, std::vector<Sample>>> participants,
                             const ProtocolConfig& cfg);

/// Runs ring passes (each agent forwarding its delta to its successor and the
/// successor merging and retraining) until a pass transmits nothing. If the
/// support sets then differ, one agreement lap carries the set of the agent
/// that merged last around the ring: each hop announces the ids, the
/// receiver requests the vectors it lacks, and every agent retrains on that
/// set. Equal sets with differing models are refit locally on the common set.
/// Afterwards every agent holds the same model. Throws ProtocolError after
/// max_passes.
void cluster_pass(TrainingSession& session, Medium& medium, const ProtocolConfig& cfg);

/// Highest residual energy, ties to the lowest node id.
NodeId elect_representative(std::span<const NodeId> agents,
                            const std::function<double(NodeId)>& residual_energy);

struct GlobalExchange {
  std::map<std::uint32_t, NodeId> representatives;
  SupportVectorSet global_set;
  std::map<Link, std::uint64_t> link_bytes;
};

/// Representatives upload their cluster's support set to the head, heads
/// exchange all-to-all, retrain on the union, and send the resulting support
/// set down to their agents, which retrain on it. Afterwards every agent in
/// every session holds the same model. With a single cluster nothing is sent.
GlobalExchange global_exchange(std::vector<TrainingSession>& sessions,
                               const std::function<double(NodeId)>& residual_energy,
                               Medium& medium, const ProtocolConfig& cfg);

struct CommunicationReport {
  std::map<Link, std::uint64_t> link_bytes;
  std::uint64_t total_bytes = 0;
  /// Cost of every agent sending its raw training set to a base station,
  /// counted per hop like the distributed traffic.
  std::uint64_t centralized_equivalent_bytes = 0;

  double ratio() const {
    return centralized_equivalent_bytes == 0
               ? 0.0
               : static_cast<double>(total_bytes) / static_cast<double>(centralized_equivalent_bytes);
  }
};

CommunicationReport communication_report(std::span<const TrainingSession> sessions,
                                         const GlobalExchange* global, const WireFormat& wire,
                                         std::size_t base_station_hops = 1);

/// Input for one cluster of a full protocol run.
struct ClusterInput {
  std::uint32_t cluster_id = 0;
  NodeId head = 0;
  std::vector<std::pair<NodeId, std::vector<Sample>>> agents;
};

struct ProtocolResult {
  std::vector<TrainingSession> sessions;
  GlobalExchange global;
  CommunicationReport report;

  /// The model every agent agreed on.
  const svm::SvmModel& model() const;
  const svm::SvmModel& model_of(NodeId agent) const;
};

/// open_session and cluster_pass for each cluster, then global_exchange.
ProtocolResult run_protocol(std::vector<ClusterInput> clusters,
                            const std::function<double(NodeId)>& residual_energy, Medium& medium,
                            const ProtocolConfig& cfg);

}  // namespace wsnids::dist
