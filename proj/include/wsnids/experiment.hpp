#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wsnids/dataset.hpp"
#include "wsnids/dist_svm.hpp"
#include "wsnids/ids.hpp"
#include "wsnids/wsn.hpp"

namespace wsnids::exp {

struct ExperimentConfig {
  std::string dataset;
  /// Empty selects the built-in table.
  std::string category_map;
  std::vector<std::string> features = data::default_feature_ids();

  double c = 1000.0;
  double sigma = 0.4;
  bool squared_norm = true;
  double tolerance = 1e-3;
  std::size_t max_passes = 20;

  std::size_t n_nodes = 100;
  std::size_t n_clusters = 3;
  double area = 10000.0;
  double comm_range = 33.5;
  /// nullopt: derived from range and density.
  std::optional<std::size_t> n_ids;
  std::size_t train_normal = 50;
  std::size_t train_anomalous = 50;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  sim::EnergyConfig energy;

  double attack_fraction = 0.1;
  double silent_fraction = 0.05;
  std::size_t ticks = 30;

  std::vector<std::size_t> sweep{4, 8, 12, 16, 18};
  std::vector<std::string> rank_pool{"duration", "src_bytes", "dst_bytes", "hot",
                                     "count", "srv_count", "serror_rate", "dst_host_count",
                                     "srv_diff_host_rate"};

  /// Sets one key from its text form. Throws ConfigError for unknown keys or
  /// values out of range.
  void set(const std::string& key, const std::string& value);
  /// Applies `key=value` lines; blank lines and lines starting with '#' are skipped.
  void read(std::istream& in);
  static ExperimentConfig load(const std::string& path);

  /// Throws ConfigError when a parameter is outside its range.
  void validate() const;

  std::size_t resolved_n_ids() const;
  dist::ProtocolConfig protocol() const;
};

struct Confusion {
  std::size_t true_positive = 0;
  std::size_t false_negative = 0;
  std::size_t true_negative = 0;
  std::size_t false_positive = 0;

  std::size_t total() const { return true_positive + false_negative + true_negative + false_positive; }
  Confusion& operator+=(const Confusion& o);
};

/// Percentages. Rates over an empty class are absent; a simulation that
/// classified nothing reports a NaN accuracy.
struct Metrics {
  Confusion counts;
  double accuracy = 0.0;
  std::optional<double> detection_rate;
  std::optional<double> false_positive_rate;
};

/// Anomalies (-1) are the positive class. Throws InvalidInput when empty.
Metrics compute_metrics(std::span<const std::pair<int, int>> truth_and_prediction);
Metrics compute_metrics(const Confusion& counts);

struct MetricsRow {
  std::uint64_t seed = 0;
  std::size_t n_ids = 0;
  Metrics metrics;
  std::uint64_t bytes_distributed = 0;
  std::uint64_t bytes_centralized_equivalent = 0;
  std::size_t signatures_learned = 0;
  std::size_t nodes_isolated = 0;
  std::size_t reelections = 0;

  double byte_ratio() const;
};

/// Raw records and the category table named by a config.
struct Corpus {
  std::vector<data::RawRecord> records;
  data::CategoryMap categories;

  /// Throws ConfigError when the dataset path is empty.
  static Corpus load(const ExperimentConfig& cfg);
  data::LabeledDataset select(std::span<const std::string> features) const;
};

/// One network with trained agents, ready for evaluation.
struct Scenario {
  std::uint64_t seed = 0;
  sim::Network network;
  /// IDS agents ascending; an agent's position is its sampling index.
  std::vector<NodeId> agents;
  data::Normalization normalization;
  std::vector<std::size_t> training_rows;
  std::vector<std::size_t> test_rows;
  std::vector<Sample> test;  // normalized
  dist::ProtocolResult protocol;
};

/// Builds the topology, places `n_ids` agents, draws their training sets,
/// fits normalization on the pooled draws and runs the distributed protocol.
Scenario build_scenario(const ExperimentConfig& cfg, const data::LabeledDataset& ds, std::uint64_t seed,
                        std::size_t n_ids);

/// Confusion of a model over normalized samples.
Confusion evaluate(const svm::SvmModel& model, std::span<const Sample> samples);

std::vector<MetricsRow> run_train_eval(const ExperimentConfig& cfg, const data::LabeledDataset& ds);

struct ComparisonRow {
  std::uint64_t seed = 0;
  std::size_t n_ids = 0;
  Metrics distributed;
  Metrics centralized;
  std::vector<std::size_t> distributed_training_rows;
  std::vector<std::size_t> centralized_training_rows;
  std::vector<std::size_t> distributed_test_rows;
  std::vector<std::size_t> centralized_test_rows;
};

/// For each N in the sweep and each seed: the distributed run and one model
/// trained on the pooled raw draws of all agents, on the same test set.
std::vector<ComparisonRow> run_compare(const ExperimentConfig& cfg, const data::LabeledDataset& ds);

struct SimulationResult {
  MetricsRow row;
  ids::EventLog log;
  sim::Network network;
  std::vector<NodeId> compromised;
  std::vector<NodeId> silent;
  std::vector<NodeId> isolated;
  std::vector<sim::Reelection> reelections;
  /// Residual energy share of each promoted agent at the moment of promotion.
  std::vector<double> promoted_energy_share;
  /// Per agent, the signature-set version it holds at the end of the run.
  std::vector<std::pair<NodeId, std::uint64_t>> db_versions;
  std::vector<std::pair<NodeId, std::uint64_t>> head_db_versions;
};

/// Traffic replay over the detection pipeline. Each live node emits one
/// record per tick: compromised nodes from the Dos pool, the rest from the
/// normal pool, silent nodes nothing.
std::vector<SimulationResult> run_simulate(const ExperimentConfig& cfg, const data::LabeledDataset& ds);

/// Backward elimination over `cfg.rank_pool`, each subset scored by the mean
/// distributed accuracy over the seeds.
data::FeatureRanking run_rank_features(const ExperimentConfig& cfg, const Corpus& corpus);

void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows);
void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows);
void write_ranking_csv(std::ostream& out, const data::FeatureRanking& ranking);
void write_events_csv(std::ostream& out, std::span<const SimulationResult> runs);
void write_energy_csv(std::ostream& out, std::span<const SimulationResult> runs);

/// Shortest text that reads back to the same double.
std::string format_double(double v);

}  // namespace wsnids::exp
