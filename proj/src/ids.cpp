#include "wsnids/ids.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "wsnids/error.hpp"

namespace wsnids::ids {

namespace {

double euclidean(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

FeatureVector mean_of(const std::vector<const FeatureVector*>& vs) {
  FeatureVector c(vs.front()->size(), 0.0);
  for (const auto* v : vs) {
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += (*v)[i];
  }
  for (double& x : c) x /= static_cast<double>(vs.size());
  return c;
}

// Poll and vote messages carry a node id beyond the header.
constexpr std::size_t kControlPayloadBytes = 4;

}  // namespace

bool SignatureDb::add(Signature s) {
  if (contains(s.id)) return false;
  signatures_.push_back(std::move(s));
  ++version_;
  return true;
}

bool SignatureDb::contains(SignatureId id) const {
  return std::any_of(signatures_.begin(), signatures_.end(),
                     [id](const Signature& s) { return s.id == id; });
}

std::vector<Signature> predefined_signatures(std::span<const Sample> samples,
                                             std::span<const data::Category> categories) {
  if (samples.size() != categories.size()) throw InvalidInput("samples and categories differ in length");
  std::vector<Signature> out;
  SignatureId next = 0;
  for (auto cat : {data::Category::Dos, data::Category::Probe}) {
    std::vector<const FeatureVector*> members;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (categories[i] == cat) members.push_back(&samples[i].x);
    }
    if (members.empty()) continue;
    Signature s;
    s.id = next++;
    s.centroid = mean_of(members);
    std::vector<double> d;
    d.reserve(members.size());
    for (const auto* v : members) d.push_back(euclidean(*v, s.centroid));
    std::sort(d.begin(), d.end());
    // Nearest-rank 90th percentile.
    const auto rank = static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(d.size())));
    s.radius = d[std::max<std::size_t>(rank, 1) - 1];
    s.origin = SignatureOrigin::Predefined;
    s.attack_hint = cat;
    out.push_back(std::move(s));
  }
  return out;
}

std::optional<SignatureId> misuse_check(const SignatureDb& db, const IntrusionReport& report) {
  std::optional<SignatureId> best;
  double best_dist = 0.0;
  for (const auto& s : db.signatures()) {
    if (s.centroid.size() != report.features.size()) continue;
    const double d = euclidean(report.features, s.centroid);
    if (d > s.radius) continue;
    if (!best || d < best_dist || (d == best_dist && s.id < *best)) {
      best = s.id;
      best_dist = d;
    }
  }
  return best;
}

Signature derive_signature(std::span<const IntrusionReport> reports, SignatureId id, double min_radius) {
  if (reports.empty()) throw InvalidInput("a signature needs at least one report");
  std::vector<const FeatureVector*> vs;
  for (const auto& r : reports) vs.push_back(&r.features);
  Signature s;
  s.id = id;
  s.centroid = mean_of(vs);
  s.radius = min_radius;
  for (const auto* v : vs) s.radius = std::max(s.radius, euclidean(*v, s.centroid));
  s.origin = SignatureOrigin::Learned;
  return s;
}

std::string_view to_string(Vote v) {
  switch (v) {
    case Vote::Intruder:
      return "intruder";
    case Vote::Benign:
      return "benign";
    case Vote::Abstain:
      return "abstain";
  }
  return "unknown";
}

std::string_view to_string(Verdict v) { return v == Verdict::Intruder ? "intruder" : "benign"; }

Verdict tally(std::span<const Vote> votes) {
  if (votes.empty()) throw ProtocolError("no active IDS agents to poll");
  const auto yes = static_cast<std::size_t>(std::count(votes.begin(), votes.end(), Vote::Intruder));
  return 2 * yes > votes.size() ? Verdict::Intruder : Verdict::Benign;
}

const svm::SvmModel& NodeState::model() const {
  if (!model_) throw AgentNotReady("node " + std::to_string(id_) + " has no trained model");
  return *model_;
}

AnomalyResult NodeState::anomaly_check(std::span<const double> x) const {
  const auto d = model().decide(x);
  if (d.label < 0) return Suspect{d.value};
  return Normal{};
}

const FeatureVector* NodeState::last_observation(NodeId source) const {
  const auto it = last_seen_.find(source);
  return it == last_seen_.end() ? nullptr : &it->second;
}

bool NodeState::apply_alert(const Alert& alert) {
  if (!applied_.insert(alert.key()).second) return false;
  isolated_view_.insert(alert.malicious);
  if (alert.new_signature) db_.add(*alert.new_signature);
  return true;
}

std::string_view to_string(EventType t) {
  switch (t) {
    case EventType::Anomaly:
      return "anomaly";
    case EventType::MisuseMatch:
      return "misuse_match";
    case EventType::MisuseNoMatch:
      return "misuse_nomatch";
    case EventType::Alarm:
      return "alarm";
    case EventType::Poll:
      return "poll";
    case EventType::VoteCast:
      return "vote";
    case EventType::VerdictReached:
      return "verdict";
    case EventType::Isolation:
      return "isolation";
    case EventType::AlertApplied:
      return "alert_applied";
    case EventType::AlertUndeliverable:
      return "alert_undeliverable";
    case EventType::Reelection:
      return "reelection";
    case EventType::ReelectionDegraded:
      return "reelection_degraded";
    case EventType::Handover:
      return "handover";
    case EventType::Training:
      return "training";
  }
  return "unknown";
}

const LogEvent& EventLog::append(EventType type, NodeId actor, std::optional<NodeId> suspect,
                                 std::string verdict, std::optional<std::uint64_t> db_version) {
  events_.push_back({events_.size(), type, actor, suspect, std::move(verdict), db_version});
  return events_.back();
}

std::size_t EventLog::count(EventType type) const {
  return static_cast<std::size_t>(
      std::count_if(events_.begin(), events_.end(), [type](const LogEvent& e) { return e.type == type; }));
}

void EventLog::write_csv(std::ostream& out) const {
  out << "event,type,actor,suspect,verdict,db_version\n";
  for (const auto& e : events_) {
    out << e.index << ',' << to_string(e.type) << ',' << e.actor << ',';
    if (e.suspect) out << *e.suspect;
    out << ',' << e.verdict << ',';
    if (e.db_version) out << *e.db_version;
    out << '\n';
  }
}

Deployment::Deployment(sim::Network& net, data::Normalization norm, DetectionConfig cfg)
    : net_(&net), norm_(std::move(norm)), cfg_(cfg) {}

void Deployment::initialize(std::span<const Signature> predefined) {
  predefined_.assign(predefined.begin(), predefined.end());
  auto seed = [&](NodeState& s) {
    for (const auto& sig : predefined_) s.db().add(sig);
  };
  for (const auto& c : net_->topology().clusters) {
    auto [it, inserted] = heads_.try_emplace(c.head, c.head);
    if (inserted) seed(it->second);
  }
  for (auto id : net_->topology().all_ids_agents()) {
    auto [it, inserted] = agents_.try_emplace(id, id);
    if (inserted) seed(it->second);
  }
}

NodeState& Deployment::agent(NodeId id) {
  const auto it = agents_.find(id);
  if (it == agents_.end()) throw InvalidInput("node " + std::to_string(id) + " is not an IDS agent");
  return it->second;
}

const NodeState& Deployment::agent(NodeId id) const {
  return const_cast<Deployment*>(this)->agent(id);
}

NodeState& Deployment::head(NodeId id) {
  const auto it = heads_.find(id);
  if (it == heads_.end()) throw InvalidInput("node " + std::to_string(id) + " is not a cluster head");
  return it->second;
}

const NodeState& Deployment::head(NodeId id) const { return const_cast<Deployment*>(this)->head(id); }

std::vector<NodeId> Deployment::agent_ids() const {
  std::vector<NodeId> out;
  for (const auto& [id, _] : agents_) out.push_back(id);
  return out;
}

void Deployment::install_model(const svm::SvmModel& model) {
  for (auto& [_, a] : agents_) a.install_model(model);
}

std::vector<Observation> Deployment::collect(NodeId agent_id, std::span<const TrafficEvent> events) const {
  std::vector<Observation> out;
  const auto& self = net_->node(agent_id);
  if (!self.active()) return out;
  for (const auto& e : events) {
    if (e.source == agent_id || !net_->node(e.source).active()) continue;
    if (!net_->topology().in_range(agent_id, e.source)) continue;
    out.push_back({e.source, norm_.apply(e.record.x), e.record.y});
  }
  return out;
}

AnomalyResult Deployment::anomaly_check(NodeId agent_id, std::span<const double> x) const {
  return agent(agent_id).anomaly_check(x);
}

std::size_t Deployment::signature_bytes(const Signature& s) const {
  return s.centroid.size() * cfg_.wire.bytes_per_feature + cfg_.signature_overhead_bytes;
}

std::size_t Deployment::alert_bytes(const Alert& alert) const {
  std::size_t b = cfg_.wire.header_bytes + kControlPayloadBytes;
  if (alert.new_signature) b += signature_bytes(*alert.new_signature);
  return b;
}

bool Deployment::apply_alert(NodeId node, const Alert& alert) {
  NodeState* state = nullptr;
  if (auto it = agents_.find(node); it != agents_.end()) {
    state = &it->second;
  } else if (auto h = heads_.find(node); h != heads_.end()) {
    state = &h->second;
  } else {
    throw InvalidInput("node " + std::to_string(node) + " holds no detection state");
  }
  if (!state->apply_alert(alert)) return false;
  log_.append(EventType::AlertApplied, node, alert.malicious, "", state->db().version());
  return true;
}

void Deployment::broadcast(NodeId head_id, const Alert& alert) {
  const std::size_t bytes = alert_bytes(alert);
  auto to_agents = [&](NodeId h) {
    const auto cluster = net_->node(h).cluster_id;
    for (auto a : net_->topology().ids_agents(cluster)) {
      if (!agents_.contains(a) || !net_->node(a).active()) continue;
      for (const auto& hop : net_->route(h, a)) net_->transmit(hop, bytes);
      apply_alert(a, alert);
    }
  };
  apply_alert(head_id, alert);
  to_agents(head_id);
  for (const auto& c : net_->topology().clusters) {
    if (c.head == head_id) continue;
    if (!net_->node(c.head).active()) {
      log_.append(EventType::AlertUndeliverable, c.head, alert.malicious);
      continue;
    }
    for (const auto& hop : net_->route(head_id, c.head)) net_->transmit(hop, bytes);
    if (apply_alert(c.head, alert)) to_agents(c.head);
  }
}

void Deployment::report_matched(NodeId agent_id, const IntrusionReport& report, SignatureId matched) {
  const NodeId h = net_->topology().clusters.at(net_->node(agent_id).cluster_id).head;
  if (!net_->node(h).active()) {
    log_.append(EventType::AlertUndeliverable, h, report.suspect);
    return;
  }
  if (isolated_.contains(report.suspect)) return;
  log_.append(EventType::Alarm, h, report.suspect, "signature " + std::to_string(matched));
  net_->isolate(report.suspect);
  isolated_.insert(report.suspect);
  log_.append(EventType::Isolation, h, report.suspect);
  broadcast(h, Alert{report.suspect, std::nullopt, h});
}

Verdict Deployment::cooperate(NodeId head_id, const IntrusionReport& report) {
  const auto cluster = net_->node(head_id).cluster_id;
  std::vector<NodeId> voters;
  for (auto a : net_->topology().ids_agents(cluster)) {
    if (agents_.contains(a) && net_->node(a).active()) voters.push_back(a);
  }
  if (voters.empty()) {
    throw ProtocolError("cluster " + std::to_string(cluster) + " has no active IDS agents to poll");
  }

  const std::size_t control = cfg_.wire.header_bytes + kControlPayloadBytes;
  log_.append(EventType::Poll, head_id, report.suspect, std::to_string(voters.size()));
  std::vector<Vote> votes;
  for (auto a : voters) {
    for (const auto& hop : net_->route(head_id, a)) net_->transmit(hop, control);
    Vote v = Vote::Abstain;
    const auto& state = agents_.at(a);
    if (const auto* obs = state.last_observation(report.suspect); obs != nullptr && state.has_model()) {
      v = std::holds_alternative<Suspect>(state.anomaly_check(*obs)) ? Vote::Intruder : Vote::Benign;
    }
    if (net_->node(a).active()) {
      for (const auto& hop : net_->route(a, head_id)) net_->transmit(hop, control);
    }
    votes.push_back(v);
    log_.append(EventType::VoteCast, a, report.suspect, std::string(to_string(v)));
  }

  const Verdict verdict = tally(votes);
  log_.append(EventType::VerdictReached, head_id, report.suspect, std::string(to_string(verdict)));
  auto& reports = pending_reports_[report.suspect];
  if (verdict == Verdict::Intruder) {
    if (reports.empty()) reports.push_back(report);
    net_->isolate(report.suspect);
    isolated_.insert(report.suspect);
    log_.append(EventType::Isolation, head_id, report.suspect);
    // Ids are unique per head: high bits carry the issuing head.
    const SignatureId id = ((head_id + 1) << 20) | next_signature_[head_id]++;
    auto sig = derive_signature(reports, id, cfg_.min_signature_radius);
    ++learned_;
    broadcast(head_id, Alert{report.suspect, std::move(sig), head_id});
  }
  pending_reports_.erase(report.suspect);
  return verdict;
}

TrafficCounts Deployment::process_tick(std::span<const TrafficEvent> events) {
  ++tick_;
  auto due = std::move(outbox_);
  outbox_.clear();
  TrafficCounts counts;
  const std::size_t record_bytes =
      cfg_.wire.message_bytes(1, events.empty() ? 0 : events.front().record.x.size());

  for (const auto& e : events) {
    if (net_->node(e.source).active()) net_->charge(e.source, record_bytes, sim::Direction::Send);
  }

  std::vector<bool> classified(events.size(), false);
  std::map<NodeId, std::size_t> event_of;
  for (std::size_t i = 0; i < events.size(); ++i) event_of[events[i].source] = i;

  for (auto& [id, state] : agents_) {
    if (!net_->node(id).active()) continue;
    const NodeId h = net_->topology().clusters.at(net_->node(id).cluster_id).head;
    for (auto& obs : collect(id, events)) {
      net_->charge(id, record_bytes, sim::Direction::Receive);
      if (!net_->node(id).active()) break;
      if (state.considers_isolated(obs.source) || isolated_.contains(obs.source)) continue;
      const auto result = state.anomaly_check(obs.features);
      const bool flagged = std::holds_alternative<Suspect>(result);
      const std::size_t ev = event_of.at(obs.source);
      if (!classified[ev]) {
        classified[ev] = true;
        if (obs.true_label < 0) {
          (flagged ? counts.true_positive : counts.false_negative)++;
        } else {
          (flagged ? counts.false_positive : counts.true_negative)++;
        }
      }
      state.observe(obs.source, obs.features);
      if (!flagged) continue;

      IntrusionReport report{id, obs.source, obs.features, std::get<Suspect>(result).decision_value, tick_};
      log_.append(EventType::Anomaly, id, obs.source);
      const auto matched = misuse_check(state.db(), report);
      log_.append(matched ? EventType::MisuseMatch : EventType::MisuseNoMatch, id, obs.source,
                  matched ? "signature " + std::to_string(*matched) : "");
      const std::size_t bytes = cfg_.wire.message_bytes(1, report.features.size()) + kControlPayloadBytes;
      for (const auto& hop : net_->route(id, h)) net_->transmit(hop, bytes);
      outbox_.push_back({id, std::move(report), matched});
    }
  }

  for (const auto& msg : due) deliver(msg);
  // Unmatched reports were queued per suspect by deliver(); one poll each.
  std::vector<std::pair<NodeId, IntrusionReport>> polls;
  for (const auto& msg : due) {
    if (msg.matched) continue;
    const NodeId h = net_->topology().clusters.at(net_->node(msg.agent).cluster_id).head;
    const bool seen = std::any_of(polls.begin(), polls.end(), [&](const auto& p) {
      return p.first == h && p.second.suspect == msg.report.suspect;
    });
    if (!seen) polls.emplace_back(h, msg.report);
  }
  for (const auto& [h, report] : polls) {
    if (isolated_.contains(report.suspect) || !net_->node(h).active()) continue;
    if (!pending_reports_.contains(report.suspect)) continue;
    cooperate(h, report);
  }
  return counts;
}

void Deployment::deliver(const PendingMessage& msg) {
  if (msg.matched) {
    report_matched(msg.agent, msg.report, *msg.matched);
    return;
  }
  if (isolated_.contains(msg.report.suspect)) return;
  pending_reports_[msg.report.suspect].push_back(msg.report);
}

void Deployment::flush() {
  process_tick({});
}

void Deployment::handle_reelection(const sim::Reelection& ev) {
  const NodeId h = net_->topology().clusters.at(ev.cluster_id).head;
  if (ev.degraded) {
    log_.append(EventType::ReelectionDegraded, h);
    return;
  }
  std::string detail = "demoted " + std::to_string(ev.demoted.size()) + " promoted " +
                       std::to_string(ev.promoted.size());
  log_.append(EventType::Reelection, h, std::nullopt, detail);
  for (auto id : ev.demoted) agents_.erase(id);
  const auto& head_db = head(h).db();
  std::size_t bytes = cfg_.wire.header_bytes;
  for (const auto& s : head_db.signatures()) bytes += signature_bytes(s);
  for (auto id : ev.promoted) {
    NodeState state(id);
    state.db() = head_db;
    if (net_->node(h).active()) {
      for (const auto& hop : net_->route(h, id)) net_->transmit(hop, bytes);
    }
    agents_.insert_or_assign(id, std::move(state));
    log_.append(EventType::Handover, id, std::nullopt, "", head_db.version());
  }
}

}  // namespace wsnids::ids
