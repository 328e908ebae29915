#include "wsnids/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "wsnids/error.hpp"
#include "wsnids/random.hpp"

namespace wsnids::exp {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto t = trim(item);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  const auto* end = value.data() + value.size();
  const auto [p, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || p != end || !std::isfinite(v)) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
  return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  const auto* end = value.data() + value.size();
  const auto [p, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || p != end) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

// Accepts "3", "1,2,5" and ranges such as "1-5".
std::vector<std::uint64_t> parse_seeds(const std::string& key, const std::string& value) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split_list(value)) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      out.push_back(parse_uint(key, item));
      continue;
    }
    const auto lo = parse_uint(key, trim(item.substr(0, dash)));
    const auto hi = parse_uint(key, trim(item.substr(dash + 1)));
    if (hi < lo) throw ConfigError(key + ": empty range '" + item + "'");
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
  }
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

Sample raw(const data::LabeledDataset& ds, std::size_t row) { return ds.samples.at(row); }

std::vector<Sample> rows_of(const data::LabeledDataset& ds, std::span<const std::size_t> rows) {
  std::vector<Sample> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(raw(ds, r));
  return out;
}

std::vector<dist::ClusterInput> cluster_inputs(const sim::Network& net,
                                               std::span<const NodeId> agents,
                                               const std::vector<std::vector<Sample>>& draws) {
  std::map<std::uint32_t, dist::ClusterInput> by_cluster;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const auto& n = net.node(agents[i]);
    auto& c = by_cluster[n.cluster_id];
    c.cluster_id = n.cluster_id;
    c.head = net.topology().clusters.at(n.cluster_id).head;
    c.agents.emplace_back(agents[i], draws[i]);
  }
  std::vector<dist::ClusterInput> out;
  for (auto& [_, c] : by_cluster) out.push_back(std::move(c));
  return out;
}

double share(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

std::string optional_text(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

}  // namespace

void ExperimentConfig::set(const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key == "dataset") {
    dataset = value;
  } else if (key == "category_map") {
    category_map = value;
  } else if (key == "features") {
    features = split_list(value);
  } else if (key == "c") {
    c = parse_double(key, value);
  } else if (key == "sigma") {
    sigma = parse_double(key, value);
  } else if (key == "squared_norm") {
    squared_norm = parse_bool(key, value);
  } else if (key == "tolerance") {
    tolerance = parse_double(key, value);
  } else if (key == "max_passes") {
    max_passes = parse_uint(key, value);
  } else if (key == "n_nodes") {
    n_nodes = parse_uint(key, value);
  } else if (key == "n_clusters") {
    n_clusters = parse_uint(key, value);
  } else if (key == "area") {
    area = parse_double(key, value);
  } else if (key == "comm_range") {
    comm_range = parse_double(key, value);
  } else if (key == "n_ids") {
    if (value == "auto") {
      n_ids.reset();
    } else {
      n_ids = parse_uint(key, value);
    }
  } else if (key == "train_normal") {
    train_normal = parse_uint(key, value);
  } else if (key == "train_anomalous") {
    train_anomalous = parse_uint(key, value);
  } else if (key == "seeds") {
    seeds = parse_seeds(key, value);
  } else if (key == "tx_uj_per_byte") {
    energy.tx_uj_per_byte = parse_double(key, value);
  } else if (key == "rx_uj_per_byte") {
    energy.rx_uj_per_byte = parse_double(key, value);
  } else if (key == "node_initial_j") {
    energy.node_initial_j = parse_double(key, value);
  } else if (key == "head_initial_j") {
    energy.head_initial_j = parse_double(key, value);
  } else if (key == "instructions_per_bit") {
    energy.instructions_per_bit = parse_double(key, value);
  } else if (key == "attack_fraction") {
    attack_fraction = parse_double(key, value);
  } else if (key == "silent_fraction") {
    silent_fraction = parse_double(key, value);
  } else if (key == "ticks") {
    ticks = parse_uint(key, value);
  } else if (key == "sweep") {
    sweep.clear();
    for (auto v : parse_seeds(key, value)) sweep.push_back(static_cast<std::size_t>(v));
  } else if (key == "rank_pool") {
    rank_pool = split_list(value);
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

void ExperimentConfig::read(std::istream& in) {
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(n) + ": expected key=value");
    }
    set(t.substr(0, eq), t.substr(eq + 1));
  }
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  ExperimentConfig cfg;
  cfg.read(in);
  return cfg;
}

void ExperimentConfig::validate() const {
  require(!features.empty(), "features must not be empty");
  require(c > 0, "c must be positive");
  require(sigma > 0, "sigma must be positive");
  require(tolerance > 0, "tolerance must be positive");
  require(max_passes >= 1, "max_passes must be at least 1");
  require(n_nodes >= 1, "n_nodes must be at least 1");
  require(n_clusters >= 1 && n_clusters <= n_nodes, "n_clusters must be in [1, n_nodes]");
  require(area > 0, "area must be positive");
  require(comm_range > 0, "comm_range must be positive");
  require(!n_ids || *n_ids >= 1, "n_ids must be at least 1");
  require(train_normal >= 1 && train_anomalous >= 1, "training sizes must be at least 1");
  require(!seeds.empty(), "seeds must not be empty");
  require(energy.tx_uj_per_byte >= 0 && energy.rx_uj_per_byte >= 0, "energy costs must be non-negative");
  require(energy.node_initial_j > 0 && energy.head_initial_j > 0, "initial energies must be positive");
  require(attack_fraction >= 0 && attack_fraction <= 1, "attack_fraction must be in [0, 1]");
  require(silent_fraction >= 0 && silent_fraction <= 1, "silent_fraction must be in [0, 1]");
  require(attack_fraction + silent_fraction <= 1, "attack_fraction + silent_fraction must not exceed 1");
  require(ticks >= 1, "ticks must be at least 1");
  require(!sweep.empty() && std::all_of(sweep.begin(), sweep.end(), [](auto n) { return n >= 1; }),
          "sweep values must be at least 1");
  require(rank_pool.size() >= 2, "rank_pool needs at least two features");
}

std::size_t ExperimentConfig::resolved_n_ids() const {
  if (n_ids) return *n_ids;
  return sim::ids_count(comm_range, static_cast<double>(n_nodes) / area);
}

dist::ProtocolConfig ExperimentConfig::protocol() const {
  dist::ProtocolConfig p;
  p.svm.c = c;
  p.svm.kernel.sigma = sigma;
  p.svm.kernel.squared_norm = squared_norm;
  p.svm.tolerance = tolerance;
  p.max_passes = max_passes;
  return p;
}

Confusion& Confusion::operator+=(const Confusion& o) {
  true_positive += o.true_positive;
  false_negative += o.false_negative;
  true_negative += o.true_negative;
  false_positive += o.false_positive;
  return *this;
}

Metrics compute_metrics(const Confusion& k) {
  if (k.total() == 0) throw InvalidInput("no predictions to score");
  Metrics m;
  m.counts = k;
  m.accuracy = static_cast<double>(k.true_positive + k.true_negative) * 100.0 /
               static_cast<double>(k.total());
  const auto anomalies = k.true_positive + k.false_negative;
  const auto normals = k.true_negative + k.false_positive;
  if (anomalies > 0) {
    m.detection_rate = static_cast<double>(k.true_positive) * 100.0 / static_cast<double>(anomalies);
  }
  if (normals > 0) {
    m.false_positive_rate = static_cast<double>(k.false_positive) * 100.0 / static_cast<double>(normals);
  }
  return m;
}

Metrics compute_metrics(std::span<const std::pair<int, int>> truth_and_prediction) {
  Confusion k;
  for (const auto& [truth, predicted] : truth_and_prediction) {
    if ((truth != 1 && truth != -1) || (predicted != 1 && predicted != -1)) {
      throw InvalidInput("labels must be +1 or -1");
    }
    if (truth < 0) {
      (predicted < 0 ? k.true_positive : k.false_negative)++;
    } else {
      (predicted < 0 ? k.false_positive : k.true_negative)++;
    }
  }
  return compute_metrics(k);
}

double MetricsRow::byte_ratio() const {
  return share(static_cast<double>(bytes_distributed), static_cast<double>(bytes_centralized_equivalent));
}

Corpus Corpus::load(const ExperimentConfig& cfg) {
  if (cfg.dataset.empty()) throw ConfigError("no dataset given (--dataset PATH)");
  Corpus c;
  c.categories = cfg.category_map.empty() ? data::CategoryMap::standard()
                                          : data::CategoryMap::load(cfg.category_map);
  c.records = data::load_kdd(cfg.dataset);
  return c;
}

data::LabeledDataset Corpus::select(std::span<const std::string> features) const {
  return data::select_features(records, categories, features);
}

Confusion evaluate(const svm::SvmModel& model, std::span<const Sample> samples) {
  Confusion k;
  for (const auto& s : samples) {
    const bool flagged = model.decide(s.x).label < 0;
    if (s.y < 0) {
      (flagged ? k.true_positive : k.false_negative)++;
    } else {
      (flagged ? k.false_positive : k.true_negative)++;
    }
  }
  return k;
}

Scenario build_scenario(const ExperimentConfig& cfg, const data::LabeledDataset& ds, std::uint64_t seed,
                        std::size_t n_ids) {
  auto topo = sim::build_topology(cfg.n_nodes, cfg.area, cfg.comm_range, cfg.n_clusters, seed, cfg.energy);
  sim::place_ids(topo, n_ids);
  Scenario sc{seed, sim::Network(std::move(topo), cfg.energy), {}, {}, {}, {}, {}, {}};
  sc.agents = sc.network.topology().all_ids_agents();

  const data::SamplingPlan plan(ds, seed);
  plan.check_capacity(n_ids, cfg.train_normal, cfg.train_anomalous, n_ids);
  std::vector<std::vector<Sample>> draws;
  std::vector<Sample> pooled;
  for (std::size_t i = 0; i < sc.agents.size(); ++i) {
    const auto rows = plan.training_rows(i, cfg.train_normal, cfg.train_anomalous);
    sc.training_rows.insert(sc.training_rows.end(), rows.begin(), rows.end());
    draws.push_back(rows_of(ds, rows));
    pooled.insert(pooled.end(), draws.back().begin(), draws.back().end());
  }
  sc.normalization = data::Normalization::fit(pooled);
  for (auto& d : draws) d = sc.normalization.apply(d);

  sc.test_rows = plan.test_rows(n_ids);
  sc.test = sc.normalization.apply(rows_of(ds, sc.test_rows));

  auto& net = sc.network;
  sc.protocol = dist::run_protocol(
      cluster_inputs(net, sc.agents, draws), [&net](NodeId id) { return net.node(id).energy(); }, net,
      cfg.protocol());
  return sc;
}

std::vector<MetricsRow> run_train_eval(const ExperimentConfig& cfg, const data::LabeledDataset& ds) {
  cfg.validate();
  const std::size_t n = cfg.resolved_n_ids();
  std::vector<MetricsRow> rows;
  for (auto seed : cfg.seeds) {
    const auto sc = build_scenario(cfg, ds, seed, n);
    MetricsRow row;
    row.seed = seed;
    row.n_ids = n;
    row.metrics = compute_metrics(evaluate(sc.protocol.model_of(sc.agents.front()), sc.test));
    row.bytes_distributed = sc.protocol.report.total_bytes;
    row.bytes_centralized_equivalent = sc.protocol.report.centralized_equivalent_bytes;
    rows.push_back(row);
  }
  return rows;
}

std::vector<ComparisonRow> run_compare(const ExperimentConfig& cfg, const data::LabeledDataset& ds) {
  cfg.validate();
  std::vector<ComparisonRow> rows;
  for (auto n : cfg.sweep) {
    for (auto seed : cfg.seeds) {
      const auto sc = build_scenario(cfg, ds, seed, n);
      ComparisonRow row;
      row.seed = seed;
      row.n_ids = n;
      row.distributed = compute_metrics(evaluate(sc.protocol.model_of(sc.agents.front()), sc.test));
      row.distributed_training_rows = sc.training_rows;
      row.distributed_test_rows = sc.test_rows;

      // The centralized path redraws from the same plan rather than reusing
      // the scenario's rows, so the fairness check compares two derivations.
      const data::SamplingPlan plan(ds, seed);
      for (std::size_t i = 0; i < n; ++i) {
        const auto r = plan.training_rows(i, cfg.train_normal, cfg.train_anomalous);
        row.centralized_training_rows.insert(row.centralized_training_rows.end(), r.begin(), r.end());
      }
      row.centralized_test_rows = plan.test_rows(n);
      const auto pooled = rows_of(ds, row.centralized_training_rows);
      const auto norm = data::Normalization::fit(pooled);
      const auto model = svm::train(norm.apply(pooled), cfg.protocol().svm);
      row.centralized =
          compute_metrics(evaluate(model, norm.apply(rows_of(ds, row.centralized_test_rows))));
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

namespace {

// Runs the protocol among the live agents of the network and installs the
// agreed model. Returns the bytes it sent.
std::uint64_t retrain(const ExperimentConfig& cfg, const data::SamplingPlan& plan,
                      const data::Normalization& norm, sim::Network& net, ids::Deployment& dep) {
  std::vector<NodeId> live;
  for (auto id : net.topology().all_ids_agents()) {
    if (net.node(id).active()) live.push_back(id);
  }
  if (live.empty()) throw ProtocolError("no live IDS agents left to train");
  std::vector<std::vector<Sample>> draws;
  for (std::size_t i = 0; i < live.size(); ++i) {
    draws.push_back(norm.apply(plan.training(i, cfg.train_normal, cfg.train_anomalous)));
  }
  const auto result = dist::run_protocol(
      cluster_inputs(net, live, draws), [&net](NodeId id) { return net.node(id).energy(); }, net,
      cfg.protocol());
  for (auto id : live) dep.agent(id).install_model(result.model_of(id));
  for (const auto& s : result.sessions) dep.log().append(ids::EventType::Training, s.head);
  return result.report.total_bytes;
}

}  // namespace

std::vector<SimulationResult> run_simulate(const ExperimentConfig& cfg, const data::LabeledDataset& ds) {
  cfg.validate();
  const std::size_t n = cfg.resolved_n_ids();
  std::vector<SimulationResult> out;
  for (auto seed : cfg.seeds) {
    auto sc = build_scenario(cfg, ds, seed, n);
    auto& net = sc.network;
    const data::SamplingPlan plan(ds, seed);

    // Held-out rows: a slice of attacks seeds the predefined signatures, the
    // rest feed the traffic pools.
    auto unused = plan.unused_rows(n, cfg.train_normal, cfg.train_anomalous, n);
    rng::Engine pool_rng(rng::mix(seed, 5));
    rng::shuffle(unused, pool_rng);
    constexpr std::size_t kSignatureSlice = 200;
    std::vector<Sample> sig_samples;
    std::vector<data::Category> sig_categories;
    std::vector<std::size_t> normal_pool;
    std::vector<std::size_t> dos_pool;
    for (auto r : unused) {
      const auto cat = ds.categories[r];
      if (cat == data::Category::Normal) {
        normal_pool.push_back(r);
      } else if (sig_samples.size() < kSignatureSlice) {
        sig_samples.push_back(sc.normalization.apply(std::vector<Sample>{ds.samples[r]}).front());
        sig_categories.push_back(cat);
      } else if (cat == data::Category::Dos) {
        dos_pool.push_back(r);
      }
    }
    if (normal_pool.empty() || (cfg.attack_fraction > 0 && dos_pool.empty())) {
      throw InsufficientData("no held-out records left for simulated traffic");
    }

    std::vector<NodeId> ordinary;
    for (const auto& node : net.topology().nodes) {
      if (node.role == sim::Role::Ordinary) ordinary.push_back(node.id);
    }
    rng::Engine role_rng(rng::mix(seed, 6));
    rng::shuffle(ordinary, role_rng);
    const auto n_bad = static_cast<std::size_t>(std::llround(cfg.attack_fraction * static_cast<double>(cfg.n_nodes)));
    const auto n_silent = static_cast<std::size_t>(std::llround(cfg.silent_fraction * static_cast<double>(cfg.n_nodes)));
    if (n_bad + n_silent > ordinary.size()) {
      throw ConfigError("not enough ordinary nodes for the compromised and silent fractions");
    }
    SimulationResult res{{}, {}, net, {}, {}, {}, {}, {}, {}, {}};
    res.compromised.assign(ordinary.begin(), ordinary.begin() + static_cast<std::ptrdiff_t>(n_bad));
    res.silent.assign(ordinary.begin() + static_cast<std::ptrdiff_t>(n_bad),
                      ordinary.begin() + static_cast<std::ptrdiff_t>(n_bad + n_silent));
    std::sort(res.compromised.begin(), res.compromised.end());
    std::sort(res.silent.begin(), res.silent.end());
    const std::set<NodeId> bad(res.compromised.begin(), res.compromised.end());
    const std::set<NodeId> quiet(res.silent.begin(), res.silent.end());

    ids::Deployment dep(net, sc.normalization);
    const auto predefined = ids::predefined_signatures(sig_samples, sig_categories);
    dep.initialize(predefined);
    for (auto id : sc.agents) dep.agent(id).install_model(sc.protocol.model_of(id));
    for (const auto& s : sc.protocol.sessions) dep.log().append(ids::EventType::Training, s.head);

    Confusion counts;
    rng::Engine traffic(rng::mix(seed, 7));
    for (std::size_t t = 0; t < cfg.ticks; ++t) {
      std::vector<ids::TrafficEvent> events;
      for (const auto& node : net.topology().nodes) {
        if (!node.active() || quiet.contains(node.id)) continue;
        const auto& pool = bad.contains(node.id) ? dos_pool : normal_pool;
        events.push_back({node.id, ds.samples[pool[rng::index(traffic, pool.size())]]});
      }
      const auto tc = dep.process_tick(events);
      counts += Confusion{tc.true_positive, tc.false_negative, tc.true_negative, tc.false_positive};

      bool changed = false;
      for (const auto& cluster : net.topology().clusters) {
        if (net.topology().ids_agents(cluster.id).empty()) continue;
        auto ev = net.reelect_check(cluster.id);
        if (!ev) continue;
        for (auto id : ev->promoted) {
          const auto& node = net.node(id);
          res.promoted_energy_share.push_back(share(node.energy(), node.initial_energy()));
        }
        dep.handle_reelection(*ev);
        if (!ev->degraded) {
          ++res.row.reelections;
          changed = true;
        }
        res.reelections.push_back(std::move(*ev));
      }
      if (changed) retrain(cfg, plan, sc.normalization, net, dep);
    }
    dep.flush();

    res.row.seed = seed;
    res.row.n_ids = n;
    if (counts.total() > 0) {
      res.row.metrics = compute_metrics(counts);
    } else {
      // The network died before any traffic was classified.
      res.row.metrics.accuracy = std::numeric_limits<double>::quiet_NaN();
    }
    res.row.bytes_distributed = sc.protocol.report.total_bytes;
    res.row.bytes_centralized_equivalent = sc.protocol.report.centralized_equivalent_bytes;
    res.row.signatures_learned = dep.signatures_learned();
    res.row.nodes_isolated = dep.isolated().size();
    res.isolated.assign(dep.isolated().begin(), dep.isolated().end());
    for (auto id : dep.agent_ids()) {
      if (net.node(id).active()) res.db_versions.emplace_back(id, dep.agent(id).db().version());
    }
    for (const auto& cluster : net.topology().clusters) {
      res.head_db_versions.emplace_back(cluster.head, dep.head(cluster.head).db().version());
    }
    res.log = dep.log();
    res.network = net;
    out.push_back(std::move(res));
  }
  return out;
}

data::FeatureRanking run_rank_features(const ExperimentConfig& cfg, const Corpus& corpus) {
  cfg.validate();
  auto evaluator = [&](const std::vector<std::string>& features) {
    ExperimentConfig sub = cfg;
    sub.features = features;
    const auto rows = run_train_eval(sub, corpus.select(features));
    data::EvalResult r;
    for (const auto& row : rows) {
      r.accuracy += row.metrics.accuracy;
      r.detection_rate += row.metrics.detection_rate.value_or(0.0);
    }
    r.accuracy /= static_cast<double>(rows.size());
    r.detection_rate /= static_cast<double>(rows.size());
    return r;
  };
  return data::rank_features(cfg.rank_pool, evaluator);
}

std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows) {
  out << "seed,n_ids,accuracy,detection_rate,false_positive_rate,true_positive,false_negative,"
         "true_negative,false_positive,bytes_distributed,bytes_centralized_equivalent,byte_ratio,"
         "signatures_learned,nodes_isolated,reelections\n";
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    out << r.seed << ',' << r.n_ids << ',' << (std::isnan(m.accuracy) ? "" : format_double(m.accuracy))
        << ',' << optional_text(m.detection_rate) << ',' << optional_text(m.false_positive_rate) << ','
        << m.counts.true_positive << ',' << m.counts.false_negative << ',' << m.counts.true_negative
        << ',' << m.counts.false_positive << ',' << r.bytes_distributed << ','
        << r.bytes_centralized_equivalent << ',' << format_double(r.byte_ratio()) << ','
        << r.signatures_learned << ',' << r.nodes_isolated << ',' << r.reelections << '\n';
  }
}

void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows) {
  out << "seed,n_ids,accuracy_distributed,accuracy_centralized,detection_rate_distributed,"
         "detection_rate_centralized,false_positive_rate_distributed,false_positive_rate_centralized\n";
  for (const auto& r : rows) {
    out << r.seed << ',' << r.n_ids << ',' << format_double(r.distributed.accuracy) << ','
        << format_double(r.centralized.accuracy) << ',' << optional_text(r.distributed.detection_rate)
        << ',' << optional_text(r.centralized.detection_rate) << ','
        << optional_text(r.distributed.false_positive_rate) << ','
        << optional_text(r.centralized.false_positive_rate) << '\n';
  }
}

void write_ranking_csv(std::ostream& out, const data::FeatureRanking& ranking) {
  out << "n_features,features,accuracy,detection_rate\n";
  for (const auto& r : ranking.rows) {
    std::string joined;
    for (const auto& f : r.features) {
      if (!joined.empty()) joined += ';';
      joined += f;
    }
    out << r.features.size() << ',' << joined << ',' << format_double(r.accuracy) << ','
        << format_double(r.detection_rate) << '\n';
  }
}

void write_events_csv(std::ostream& out, std::span<const SimulationResult> runs) {
  out << "seed,event,type,actor,suspect,verdict,db_version\n";
  for (const auto& run : runs) {
    for (const auto& e : run.log.events()) {
      out << run.row.seed << ',' << e.index << ',' << ids::to_string(e.type) << ',' << e.actor << ',';
      if (e.suspect) out << *e.suspect;
      out << ',' << e.verdict << ',';
      if (e.db_version) out << *e.db_version;
      out << '\n';
    }
  }
}

void write_energy_csv(std::ostream& out, std::span<const SimulationResult> runs) {
  out << "seed,node,role,cluster,initial_j,residual_j,bytes_sent,bytes_received,spent_j,"
         "instruction_equivalents,isolated,dead\n";
  for (const auto& run : runs) {
    const auto& net = run.network;
    for (const auto& node : net.topology().nodes) {
      const auto& t = net.ledger().totals(node.id);
      out << run.row.seed << ',' << node.id << ',' << sim::to_string(node.role) << ','
          << node.cluster_id << ',' << format_double(node.initial_energy()) << ','
          << format_double(node.energy()) << ',' << t.bytes_sent << ',' << t.bytes_received << ','
          << format_double(static_cast<double>(t.spent_nj) * 1e-9) << ','
          << format_double(net.instruction_equivalents(t.bytes_sent + t.bytes_received)) << ','
          << (node.isolated ? 1 : 0) << ',' << (node.dead ? 1 : 0) << '\n';
    }
  }
}

}  // namespace wsnids::exp
