#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wsnids/types.hpp"

namespace wsnids::data {

inline constexpr std::size_t kKddFeatureCount = 41;

/// Field names of a KDD'99 connection record, in file order.
const std::array<std::string_view, kKddFeatureCount>& kdd_field_names();

/// protocol_type, service and flag carry text rather than numbers.
bool is_symbolic_field(std::size_t index);

std::optional<std::size_t> kdd_field_index(std::string_view name);

/// One parsed connection record. Symbolic fields hold NaN in `values` and
/// their text in `protocol_type`, `service` and `flag`.
struct RawRecord {
  std::array<double, kKddFeatureCount> values{};
  std::string protocol_type;
  std::string service;
  std::string flag;
  std::string label;
  std::size_t line = 0;
};

/// Parses comma-separated KDD'99 text, one record per line. Blank lines are skipped.
std::vector<RawRecord> parse_kdd(std::istream& in);

/// Reads a plain or gzip-compressed KDD'99 file.
std::vector<RawRecord> load_kdd(const std::string& path);

enum class Category { Normal, Dos, Probe, U2r, R2l };

std::string_view to_string(Category c);
std::optional<Category> parse_category(std::string_view text);

/// Attack label with surrounding whitespace and the trailing period removed.
std::string canonical_label(std::string_view label);

/// Attack name to category table, read from `name<TAB>category` lines.
class CategoryMap {
 public:
  CategoryMap() = default;
  explicit CategoryMap(std::map<std::string, Category> entries);

  static CategoryMap parse(std::istream& in);
  static CategoryMap load(const std::string& path);
  /// The table for every label that occurs in the 10% KDD'99 corpus.
  static const CategoryMap& standard();

  /// Throws UnknownLabel for names absent from the table.
  Category category_of(std::string_view label) const;
  bool contains(std::string_view label) const;
  const std::map<std::string, Category>& entries() const noexcept { return entries_; }

  friend bool operator==(const CategoryMap&, const CategoryMap&) = default;

 private:
  std::map<std::string, Category> entries_;
};

/// +1 for Normal, -1 for Dos and Probe, nullopt for the excluded U2r and R2l.
std::optional<int> label_for(Category c);
std::optional<int> map_label(const RawRecord& r, const CategoryMap& cm);

struct MinMax {
  double min = 0.0;
  double max = 0.0;

  friend bool operator==(const MinMax&, const MinMax&) = default;
};

/// Per-feature min-max scaling to [0, 1]. Constant features map to 0 and
/// values outside the fitted range are clipped.
class Normalization {
 public:
  Normalization() = default;
  explicit Normalization(std::vector<MinMax> ranges) : ranges_(std::move(ranges)) {}

  static Normalization fit(std::span<const Sample> samples);

  double scale(std::size_t feature, double value) const;
  FeatureVector apply(std::span<const double> x) const;
  std::vector<Sample> apply(std::span<const Sample> samples) const;
  const std::vector<MinMax>& ranges() const noexcept { return ranges_; }
  std::size_t dimension() const noexcept { return ranges_.size(); }

  friend bool operator==(const Normalization&, const Normalization&) = default;

 private:
  std::vector<MinMax> ranges_;
};

/// Labelled samples over a chosen feature subset. `categories` is aligned
/// with `samples`; a sample's id is the row index of its source record.
struct LabeledDataset {
  std::vector<Sample> samples;
  std::vector<Category> categories;
  std::vector<std::string> feature_ids;
  std::optional<Normalization> normalization;

  std::size_t dimension() const noexcept { return feature_ids.size(); }
};

/// src_bytes, dst_bytes, count, srv_diff_host_rate.
const std::vector<std::string>& default_feature_ids();

/// Every non-symbolic KDD field, in file order.
std::vector<std::string> numeric_feature_ids();

/// Projects records onto `feature_ids` and maps their labels; records in
/// excluded categories are dropped. Record order is preserved.
LabeledDataset select_features(std::span<const RawRecord> records, const CategoryMap& cm,
                               std::span<const std::string> feature_ids);

/// Fits min-max statistics on `ds` itself and applies them.
LabeledDataset normalize(const LabeledDataset& ds);

LabeledDataset apply_normalization(const LabeledDataset& ds, const Normalization& norm);

/// Keeps the listed columns of every sample, in the given order.
std::vector<Sample> project(std::span<const Sample> samples, std::span<const std::size_t> columns);

/// Deterministic partition of a dataset into per-agent training draws and a
/// test draw. Training draws come from the head of seeded permutations of the
/// normal and anomalous pools; the test draw comes from the tail, so the two
/// never overlap while the pools are large enough. Anomalous draws alternate
/// between Dos and Probe records.
class SamplingPlan {
 public:
  SamplingPlan(const LabeledDataset& ds, std::uint64_t seed);

  /// Row positions (into ds.samples) of one agent's draw.
  std::vector<std::size_t> training_rows(std::size_t agent_id, std::size_t n_normal,
                                         std::size_t n_anomalous) const;
  std::vector<std::size_t> test_rows(std::size_t n_agents) const;

  std::vector<Sample> training(std::size_t agent_id, std::size_t n_normal,
                               std::size_t n_anomalous) const;
  std::vector<Sample> test(std::size_t n_agents) const;

  /// Throws InsufficientData unless `n_agents` training draws and the test
  /// draw fit in the pools without overlapping.
  void check_capacity(std::size_t n_agents, std::size_t n_normal, std::size_t n_anomalous,
                      std::size_t n_test_agents) const;

  /// Rows not used by the first `n_agents` training draws or the test draw.
  std::vector<std::size_t> unused_rows(std::size_t n_agents, std::size_t n_normal,
                                       std::size_t n_anomalous, std::size_t n_test_agents) const;

  std::size_t normal_pool_size() const noexcept { return normals_.size(); }
  std::size_t anomalous_pool_size() const noexcept { return anomalies_head_.size(); }

 private:
  const LabeledDataset* ds_;
  std::vector<std::size_t> normals_;
  std::vector<std::size_t> anomalies_head_;
  std::vector<std::size_t> anomalies_tail_;
  std::uint64_t seed_;
};

inline constexpr std::size_t kTestRecordsPerAgent = 60;
inline constexpr double kTestAnomalousShare = 0.42;

/// Number of anomalous records in a test draw for `n_agents` agents.
std::size_t test_anomalous_count(std::size_t n_agents);

std::vector<Sample> sample_agent_training(const LabeledDataset& ds, std::size_t n_normal,
                                          std::size_t n_anomalous, std::size_t agent_id,
                                          std::uint64_t seed);

std::vector<Sample> sample_test(const LabeledDataset& ds, std::size_t n_agents, std::uint64_t seed);

struct EvalResult {
  double accuracy = 0.0;
  double detection_rate = 0.0;
};

struct RankingRow {
  std::vector<std::string> features;
  double accuracy = 0.0;
  double detection_rate = 0.0;
};

struct FeatureRanking {
  std::vector<RankingRow> rows;

  /// Rows whose subset size is in `sizes`, in ranking order.
  FeatureRanking with_sizes(std::span<const std::size_t> sizes) const;
};

/// Trains and evaluates a classifier restricted to the given feature ids.
using SubsetEvaluator = std::function<EvalResult(const std::vector<std::string>& feature_ids)>;

/// Backward elimination: evaluates the base subset, then repeatedly drops the
/// feature whose removal gives the best accuracy until two remain. Equal
/// accuracies drop the feature with the higher KDD field index.
FeatureRanking rank_features(std::span<const std::string> base_feature_ids,
                             const SubsetEvaluator& train_eval);

}  // namespace wsnids::data
