#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "wsnids/dataset.hpp"
#include "wsnids/dist_svm.hpp"
#include "wsnids/svm.hpp"
#include "wsnids/types.hpp"
#include "wsnids/wsn.hpp"

namespace wsnids::ids {

using SignatureId = std::uint32_t;

enum class SignatureOrigin { Predefined, Learned };

/// A ball in normalized feature space.
struct Signature {
  SignatureId id = 0;
  FeatureVector centroid;
  double radius = 0.0;
  SignatureOrigin origin = SignatureOrigin::Predefined;
  std::optional<data::Category> attack_hint;

  friend bool operator==(const Signature&, const Signature&) = default;
};

class SignatureDb {
 public:
  /// Returns false, leaving the version unchanged, if the id is already stored.
  bool add(Signature s);
  bool contains(SignatureId id) const;
  const std::vector<Signature>& signatures() const noexcept { return signatures_; }
  std::uint64_t version() const noexcept { return version_; }
  std::size_t size() const noexcept { return signatures_.size(); }

  friend bool operator==(const SignatureDb&, const SignatureDb&) = default;

 private:
  std::vector<Signature> signatures_;
  std::uint64_t version_ = 0;
};

/// One signature per anomalous category present: centroid of its vectors,
/// radius at the 90th percentile of their distances to it.
std::vector<Signature> predefined_signatures(std::span<const Sample> samples,
                                             std::span<const data::Category> categories);

struct IntrusionReport {
  NodeId reporter = 0;
  NodeId suspect = 0;
  FeatureVector features;
  double decision_value = 0.0;
  std::size_t timestamp = 0;
};

/// Nearest signature whose ball contains the features; equal distances go to
/// the lower id.
std::optional<SignatureId> misuse_check(const SignatureDb& db, const IntrusionReport& report);

inline constexpr double kMinSignatureRadius = 0.05;

/// Centroid of the reports' features with the radius reaching the farthest
/// of them, never below `min_radius`.
Signature derive_signature(std::span<const IntrusionReport> reports, SignatureId id,
                           double min_radius = kMinSignatureRadius);

struct Alert {
  NodeId malicious = 0;
  std::optional<Signature> new_signature;
  NodeId issuing_head = 0;

  /// Idempotence key: the malicious node and the carried signature, if any.
  std::pair<NodeId, std::optional<SignatureId>> key() const {
    return {malicious, new_signature ? std::optional(new_signature->id) : std::nullopt};
  }
};

struct Normal {};
struct Suspect {
  double decision_value = 0.0;
};
using AnomalyResult = std::variant<Normal, Suspect>;

enum class Vote { Intruder, Benign, Abstain };
enum class Verdict { Intruder, Benign };

std::string_view to_string(Vote v);
std::string_view to_string(Verdict v);

/// Intruder iff intruder votes exceed half of all polled agents, abstentions
/// included. Throws ProtocolError when nobody was polled.
Verdict tally(std::span<const Vote> votes);

/// Detection state held by one IDS agent or cluster head.
class NodeState {
 public:
  explicit NodeState(NodeId id) : id_(id) {}

  NodeId id() const noexcept { return id_; }
  const SignatureDb& db() const noexcept { return db_; }
  SignatureDb& db() noexcept { return db_; }
  bool has_model() const noexcept { return model_.has_value(); }
  const svm::SvmModel& model() const;
  void install_model(svm::SvmModel m) { model_ = std::move(m); }

  /// Throws AgentNotReady without a trained model.
  AnomalyResult anomaly_check(std::span<const double> x) const;

  void observe(NodeId source, FeatureVector x) { last_seen_[source] = std::move(x); }
  const FeatureVector* last_observation(NodeId source) const;

  /// Returns false for an alert already applied.
  bool apply_alert(const Alert& alert);
  bool considers_isolated(NodeId node) const { return isolated_view_.contains(node); }

 private:
  NodeId id_;
  std::optional<svm::SvmModel> model_;
  SignatureDb db_;
  std::map<NodeId, FeatureVector> last_seen_;
  std::set<NodeId> isolated_view_;
  std::set<std::pair<NodeId, std::optional<SignatureId>>> applied_;
};

/// One record emitted by a node during a tick.
struct TrafficEvent {
  NodeId source = 0;
  Sample record;  // raw (unnormalized) features
};

struct Observation {
  NodeId source = 0;
  FeatureVector features;  // normalized
  int true_label = 1;
};

enum class EventType {
  Anomaly,
  MisuseMatch,
  MisuseNoMatch,
  Alarm,
  Poll,
  VoteCast,
  VerdictReached,
  Isolation,
  AlertApplied,
  AlertUndeliverable,
  Reelection,
  ReelectionDegraded,
  Handover,
  Training,
};

std::string_view to_string(EventType t);

struct LogEvent {
  std::size_t index = 0;
  EventType type = EventType::Anomaly;
  NodeId actor = 0;
  std::optional<NodeId> suspect;
  std::string verdict;
  std::optional<std::uint64_t> db_version;
};

class EventLog {
 public:
  const LogEvent& append(EventType type, NodeId actor, std::optional<NodeId> suspect = {},
                         std::string verdict = {}, std::optional<std::uint64_t> db_version = {});
  const std::vector<LogEvent>& events() const noexcept { return events_; }
  std::size_t count(EventType type) const;
  /// Header: event,type,actor,suspect,verdict,db_version
  void write_csv(std::ostream& out) const;

 private:
  std::vector<LogEvent> events_;
};

struct DetectionConfig {
  dist::WireFormat wire;
  double min_signature_radius = kMinSignatureRadius;
  /// Bytes for a signature body beyond its centroid (id and radius).
  std::size_t signature_overhead_bytes = 8;
};

/// Per-tick classification counts of the anomaly engine over observed traffic.
struct TrafficCounts {
  std::size_t true_positive = 0;
  std::size_t false_negative = 0;
  std::size_t true_negative = 0;
  std::size_t false_positive = 0;
};

/// The detection pipeline for every IDS agent and cluster head of a network:
/// data collection, anomaly engine, misuse engine, cooperative voting and
/// alert propagation. Reports an agent sends to its head are handled on the
/// following tick.
class Deployment {
 public:
  Deployment(sim::Network& net, data::Normalization norm, DetectionConfig cfg = {});

  sim::Network& network() noexcept { return *net_; }
  const EventLog& log() const noexcept { return log_; }
  EventLog& log() noexcept { return log_; }

  /// Adds state for every current IDS agent and head, seeding each database
  /// with `predefined`.
  void initialize(std::span<const Signature> predefined);

  NodeState& agent(NodeId id);
  const NodeState& agent(NodeId id) const;
  NodeState& head(NodeId id);
  const NodeState& head(NodeId id) const;
  bool has_agent(NodeId id) const { return agents_.contains(id); }
  std::vector<NodeId> agent_ids() const;

  /// Installs the same model on every agent.
  void install_model(const svm::SvmModel& model);

  /// Records from active sources other than the agent within its radio range,
  /// normalized.
  std::vector<Observation> collect(NodeId agent, std::span<const TrafficEvent> events) const;

  AnomalyResult anomaly_check(NodeId agent, std::span<const double> x) const;

  /// Head isolates the suspect and alerts its agents and all other heads.
  void report_matched(NodeId agent, const IntrusionReport& report, SignatureId matched);

  /// Polls the head's active agents on their latest observation of the suspect.
  Verdict cooperate(NodeId head, const IntrusionReport& report);

  /// Delivers an alert to one node. Returns false for duplicates.
  bool apply_alert(NodeId node, const Alert& alert);

  /// One round: emission, collection, anomaly and misuse checks at agents,
  /// then head handling of the reports queued on the previous tick.
  TrafficCounts process_tick(std::span<const TrafficEvent> events);

  /// Delivers queued reports without new traffic.
  void flush();

  /// Applies a re-election outcome: drops demoted agents and gives promoted
  /// ones the head's signature set.
  void handle_reelection(const sim::Reelection& ev);

  std::size_t tick() const noexcept { return tick_; }
  std::size_t signatures_learned() const noexcept { return learned_; }
  const std::set<NodeId>& isolated() const noexcept { return isolated_; }

 private:
  struct PendingMessage {
    NodeId agent = 0;
    IntrusionReport report;
    std::optional<SignatureId> matched;
  };

  void broadcast(NodeId head, const Alert& alert);
  void deliver(const PendingMessage& msg);
  std::size_t alert_bytes(const Alert& alert) const;
  std::size_t signature_bytes(const Signature& s) const;

  sim::Network* net_;
  data::Normalization norm_;
  DetectionConfig cfg_;
  std::map<NodeId, NodeState> agents_;
  std::map<NodeId, NodeState> heads_;
  std::map<NodeId, std::vector<IntrusionReport>> pending_reports_;
  std::vector<PendingMessage> outbox_;
  std::set<NodeId> isolated_;
  std::vector<Signature> predefined_;
  EventLog log_;
  std::size_t tick_ = 0;
  std::size_t learned_ = 0;
  std::map<NodeId, std::uint32_t> next_signature_;
};

}  // namespace wsnids::ids
