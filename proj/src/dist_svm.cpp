#include "wsnids/dist_svm.hpp"

#include <algorithm>

#include "wsnids/error.hpp"

namespace wsnids::dist {

namespace {

void send(std::map<Link, std::uint64_t>& counters, Medium& medium, NodeId from, NodeId to,
          std::size_t bytes) {
  for (const auto& hop : medium.route(from, to)) {
    medium.transmit(hop, bytes);
    counters[hop] += bytes;
  }
}

std::size_t dimension_of(const SupportVectorSet& s) {
  return s.empty() ? 0 : s.vectors().front().x.size();
}

bool all_equal(const TrainingSession& session) {
  for (std::size_t i = 1; i < session.agents.size(); ++i) {
    if (!(session.agents[i].support_vectors == session.agents[0].support_vectors)) return false;
  }
  return true;
}

bool models_agree(const TrainingSession& session) {
  for (std::size_t i = 1; i < session.agents.size(); ++i) {
    if (!(*session.agents[i].model == *session.agents[0].model)) return false;
  }
  return true;
}

// Agent 0 merged last in the quiet pass; its set travels once around the ring
// and every agent, agent 0 included, retrains on exactly that set. Each sender
// has then announced the whole set to its successor.
void agreement_lap(TrainingSession& session, Medium& medium, const ProtocolConfig& cfg) {
  ++session.agreement_laps;
  const SupportVectorSet target = session.agents.front().support_vectors;
  const auto target_ids = target.ids();
  const std::size_t dim = dimension_of(target);
  const auto agreed = local_train(target.vectors(), cfg);
  const std::size_t k = session.agents.size();
  for (std::size_t i = 0; i < k; ++i) {
    auto& sender = session.agents[i];
    auto& receiver = session.agents[(i + 1) % k];
    std::vector<Sample> missing;
    if (i + 1 < k) {
      for (const auto& v : target.vectors()) {
        if (!receiver.support_vectors.contains(v.id)) missing.push_back(v);
      }
    }
    send(session.link_bytes, medium, sender.id, receiver.id, cfg.wire.id_list_bytes(target.size()));
    send(session.link_bytes, medium, receiver.id, sender.id, cfg.wire.id_list_bytes(missing.size()));
    if (!missing.empty()) {
      send(session.link_bytes, medium, sender.id, receiver.id, cfg.wire.message_bytes(missing.size(), dim));
      session.vectors_sent += missing.size();
    }
    sender.transmitted.insert(target_ids.begin(), target_ids.end());
  }
  for (auto& a : session.agents) adopt(a, agreed);
}

}  // namespace

SupportVectorSet::SupportVectorSet(std::vector<Sample> vectors) : vectors_(std::move(vectors)) {
  std::stable_sort(vectors_.begin(), vectors_.end(),
                   [](const Sample& a, const Sample& b) { return a.id < b.id; });
  vectors_.erase(std::unique(vectors_.begin(), vectors_.end(),
                             [](const Sample& a, const Sample& b) { return a.id == b.id; }),
                 vectors_.end());
}

bool SupportVectorSet::contains(SampleId id) const {
  const auto it = std::lower_bound(vectors_.begin(), vectors_.end(), id,
                                   [](const Sample& s, SampleId v) { return s.id < v; });
  return it != vectors_.end() && it->id == id;
}

std::set<SampleId> SupportVectorSet::ids() const {
  std::set<SampleId> out;
  for (const auto& s : vectors_) out.insert(s.id);
  return out;
}

SupportVectorSet SupportVectorSet::unite(const SupportVectorSet& a, const SupportVectorSet& b) {
  std::vector<Sample> all = a.vectors_;
  all.insert(all.end(), b.vectors_.begin(), b.vectors_.end());
  return SupportVectorSet(std::move(all));
}

LocalModel local_train(std::span<const Sample> agent_data, const ProtocolConfig& cfg) {
  auto model = svm::train(agent_data, cfg.svm);
  SupportVectorSet svs(model.support_vectors());
  return {std::move(model), std::move(svs)};
}

LocalModel merge_and_retrain(const SupportVectorSet& own, const SupportVectorSet& received,
                             const ProtocolConfig& cfg) {
  if (!own.empty() && !received.empty() && dimension_of(own) != dimension_of(received)) {
    throw InvalidInput("support vector sets differ in dimension");
  }
  const auto merged = SupportVectorSet::unite(own, received);
  return local_train(merged.vectors(), cfg);
}

std::vector<Sample> delta_payload(AgentState& agent, const SupportVectorSet& new_svs) {
  std::vector<Sample> payload;
  for (const auto& s : new_svs.vectors()) {
    if (agent.transmitted.insert(s.id).second) payload.push_back(s);
  }
  return payload;
}

void adopt(AgentState& agent, LocalModel local) {
  agent.model = std::move(local.model);
  agent.support_vectors = std::move(local.support_vectors);
  std::erase_if(agent.transmitted,
                [&](SampleId id) { return !agent.support_vectors.contains(id); });
}

const AgentState& TrainingSession::agent(NodeId id) const {
  for (const auto& a : agents) {
    if (a.id == id) return a;
  }
  throw InvalidInput("agent " + std::to_string(id) + " is not in the session");
}

AgentState& TrainingSession::agent(NodeId id) {
  return const_cast<AgentState&>(std::as_const(*this).agent(id));
}

TrainingSession open_session(std::uint32_t cluster_id, NodeId head,
                             std::vector<std::pair<NodeId, std::vector<Sample>>> participants,
                             const ProtocolConfig& cfg) {
  TrainingSession session;
  session.cluster_id = cluster_id;
  session.head = head;
  std::sort(participants.begin(), participants.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [id, data] : participants) {
    if (!session.agents.empty() && session.agents.back().id == id) {
      throw InvalidInput("duplicate agent id " + std::to_string(id));
    }
    AgentState agent;
    agent.id = id;
    agent.data = std::move(data);
    adopt(agent, local_train(agent.data, cfg));
    session.agents.push_back(std::move(agent));
  }
  return session;
}

void cluster_pass(TrainingSession& session, Medium& medium, const ProtocolConfig& cfg) {
  const std::size_t k = session.agents.size();
  for (const auto& a : session.agents) {
    if (!a.model) throw ProtocolError("agent " + std::to_string(a.id) + " has not trained locally");
  }
  if (k <= 1) {
    session.converged = true;
    return;
  }

  session.converged = false;
  while (session.passes < cfg.max_passes) {
    ++session.passes;
    std::size_t novel = 0;
    for (std::size_t i = 0; i < k; ++i) {
      auto& sender = session.agents[i];
      auto& receiver = session.agents[(i + 1) % k];
      auto payload = delta_payload(sender, sender.support_vectors);
      if (payload.empty()) continue;
      novel += payload.size();
      session.vectors_sent += payload.size();
      send(session.link_bytes, medium, sender.id, receiver.id,
           cfg.wire.message_bytes(payload.size(), payload.front().x.size()));
      adopt(receiver,
            merge_and_retrain(receiver.support_vectors, SupportVectorSet(std::move(payload)), cfg));
    }
    if (novel > 0) {
      ++session.rounds;
      continue;
    }
    if (!all_equal(session)) {
      agreement_lap(session, medium, cfg);
    } else if (!models_agree(session)) {
      // Equal sets, but each model was fit on a different union.
      const auto agreed = local_train(session.agents.front().support_vectors.vectors(), cfg);
      for (auto& a : session.agents) adopt(a, agreed);
    }
    session.converged = true;
    return;
  }
  throw ProtocolError("cluster " + std::to_string(session.cluster_id) +
                      " did not converge within " + std::to_string(cfg.max_passes) + " passes");
}

NodeId elect_representative(std::span<const NodeId> agents,
                            const std::function<double(NodeId)>& residual_energy) {
  if (agents.empty()) throw InvalidInput("no agents to elect from");
  NodeId best = agents.front();
  double best_energy = residual_energy(best);
  for (auto id : agents.subspan(1)) {
    const double e = residual_energy(id);
    if (e > best_energy || (e == best_energy && id < best)) {
      best = id;
      best_energy = e;
    }
  }
  return best;
}

GlobalExchange global_exchange(std::vector<TrainingSession>& sessions,
                               const std::function<double(NodeId)>& residual_energy,
                               Medium& medium, const ProtocolConfig& cfg) {
  GlobalExchange out;
  std::vector<TrainingSession*> active;
  for (auto& s : sessions) {
    if (s.agents.empty()) continue;
    if (!s.converged) {
      throw ProtocolError("cluster " + std::to_string(s.cluster_id) + " has not converged");
    }
    active.push_back(&s);
  }
  if (active.empty()) throw ProtocolError("no cluster has IDS agents");

  for (auto* s : active) {
    std::vector<NodeId> ids;
    for (const auto& a : s->agents) ids.push_back(a.id);
    out.representatives[s->cluster_id] = elect_representative(ids, residual_energy);
  }

  if (active.size() == 1) {
    out.global_set = active.front()->agents.front().support_vectors;
    return out;
  }

  // Each head learns its own cluster's set from the representative.
  std::vector<SupportVectorSet> cluster_sets;
  for (auto* s : active) {
    const auto& rep = s->agent(out.representatives[s->cluster_id]);
    const auto& svs = rep.support_vectors;
    send(out.link_bytes, medium, rep.id, s->head, cfg.wire.message_bytes(svs.size(), dimension_of(svs)));
    cluster_sets.push_back(svs);
  }

  // All-to-all between heads; every head ends up with the same union.
  SupportVectorSet all;
  for (std::size_t i = 0; i < active.size(); ++i) {
    const auto& svs = cluster_sets[i];
    for (std::size_t j = 0; j < active.size(); ++j) {
      if (i == j) continue;
      send(out.link_bytes, medium, active[i]->head, active[j]->head,
           cfg.wire.message_bytes(svs.size(), dimension_of(svs)));
    }
    all = SupportVectorSet::unite(all, svs);
  }
  out.global_set = local_train(all.vectors(), cfg).support_vectors;
  // Training is deterministic, so every agent retraining on the global set
  // arrives at this same model.
  const auto agreed = local_train(out.global_set.vectors(), cfg);

  for (auto* s : active) {
    for (auto& a : s->agents) {
      std::vector<Sample> missing;
      for (const auto& v : out.global_set.vectors()) {
        if (!a.support_vectors.contains(v.id)) missing.push_back(v);
      }
      if (!missing.empty()) {
        send(out.link_bytes, medium, s->head, a.id,
             cfg.wire.message_bytes(missing.size(), missing.front().x.size()));
      }
      a.model = agreed.model;
      a.support_vectors = agreed.support_vectors;
    }
  }
  return out;
}

CommunicationReport communication_report(std::span<const TrainingSession> sessions,
                                         const GlobalExchange* global, const WireFormat& wire,
                                         std::size_t base_station_hops) {
  CommunicationReport report;
  auto add = [&](const std::map<Link, std::uint64_t>& m) {
    for (const auto& [link, bytes] : m) {
      report.link_bytes[link] += bytes;
      report.total_bytes += bytes;
    }
  };
  for (const auto& s : sessions) {
    add(s.link_bytes);
    for (const auto& a : s.agents) {
      const std::size_t dim = a.data.empty() ? 0 : a.data.front().x.size();
      report.centralized_equivalent_bytes += base_station_hops * wire.message_bytes(a.data.size(), dim);
    }
  }
  if (global != nullptr) add(global->link_bytes);
  return report;
}

const svm::SvmModel& ProtocolResult::model() const {
  for (const auto& s : sessions) {
    if (!s.agents.empty()) return *s.agents.front().model;
  }
  throw ProtocolError("protocol result holds no agents");
}

const svm::SvmModel& ProtocolResult::model_of(NodeId agent) const {
  for (const auto& s : sessions) {
    for (const auto& a : s.agents) {
      if (a.id == agent) return *a.model;
    }
  }
  throw InvalidInput("agent " + std::to_string(agent) + " took no part in the protocol");
}

ProtocolResult run_protocol(std::vector<ClusterInput> clusters,
                            const std::function<double(NodeId)>& residual_energy, Medium& medium,
                            const ProtocolConfig& cfg) {
  ProtocolResult result;
  std::sort(clusters.begin(), clusters.end(),
            [](const auto& a, const auto& b) { return a.cluster_id < b.cluster_id; });
  for (auto& c : clusters) {
    if (c.agents.empty()) continue;
    auto session = open_session(c.cluster_id, c.head, std::move(c.agents), cfg);
    cluster_pass(session, medium, cfg);
    result.sessions.push_back(std::move(session));
  }
  result.global = global_exchange(result.sessions, residual_energy, medium, cfg);
  result.report = communication_report(result.sessions, &result.global, cfg.wire, cfg.base_station_hops);
  return result;
}

}  // namespace wsnids::dist
