#include "wsnids/dataset.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <set>
#include <sstream>

#include "wsnids/error.hpp"
#include "wsnids/random.hpp"

namespace wsnids::data {

namespace {

constexpr std::array<std::string_view, kKddFeatureCount> kFieldNames = {
    "duration",
    "protocol_type",
    "service",
    "flag",
    "src_bytes",
    "dst_bytes",
    "land",
    "wrong_fragment",
    "urgent",
    "hot",
    "num_failed_logins",
    "logged_in",
    "num_compromised",
    "root_shell",
    "su_attempted",
    "num_root",
    "num_file_creations",
    "num_shells",
    "num_access_files",
    "num_outbound_cmds",
    "is_host_login",
    "is_guest_login",
    "count",
    "srv_count",
    "serror_rate",
    "srv_serror_rate",
    "rerror_rate",
    "srv_rerror_rate",
    "same_srv_rate",
    "diff_srv_rate",
    "srv_diff_host_rate",
    "dst_host_count",
    "dst_host_srv_count",
    "dst_host_same_srv_rate",
    "dst_host_diff_srv_rate",
    "dst_host_same_src_port_rate",
    "dst_host_srv_diff_host_rate",
    "dst_host_serror_rate",
    "dst_host_srv_serror_rate",
    "dst_host_rerror_rate",
    "dst_host_srv_rerror_rate",
};

constexpr std::string_view kStandardCategories =
    "normal\tnormal\n"
    "back\tdos\nland\tdos\nneptune\tdos\npod\tdos\nsmurf\tdos\nteardrop\tdos\n"
    "ipsweep\tprobe\nnmap\tprobe\nportsweep\tprobe\nsatan\tprobe\n"
    "buffer_overflow\tu2r\nloadmodule\tu2r\nperl\tu2r\nrootkit\tu2r\n"
    "ftp_write\tr2l\nguess_passwd\tr2l\nimap\tr2l\nmultihop\tr2l\nphf\tr2l\nspy\tr2l\n"
    "warezclient\tr2l\nwarezmaster\tr2l\n";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::size_t> resolve_columns(std::span<const std::string> feature_ids) {
  std::vector<std::size_t> columns;
  columns.reserve(feature_ids.size());
  for (const auto& id : feature_ids) {
    const auto idx = kdd_field_index(id);
    if (!idx) throw InvalidInput("unknown feature id '" + id + "'");
    if (is_symbolic_field(*idx)) throw UnsupportedFeature("feature '" + id + "' is symbolic");
    columns.push_back(*idx);
  }
  return columns;
}

}  // namespace

const std::array<std::string_view, kKddFeatureCount>& kdd_field_names() { return kFieldNames; }

bool is_symbolic_field(std::size_t index) { return index >= 1 && index <= 3; }

std::optional<std::size_t> kdd_field_index(std::string_view name) {
  const auto it = std::find(kFieldNames.begin(), kFieldNames.end(), name);
  if (it == kFieldNames.end()) return std::nullopt;
  return static_cast<std::size_t>(it - kFieldNames.begin());
}

std::vector<RawRecord> parse_kdd(std::istream& in) {
  std::vector<RawRecord> out;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> fields;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty()) continue;

    fields.clear();
    std::size_t start = 0;
    for (;;) {
      const auto comma = text.find(',', start);
      fields.push_back(trim(text.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != kKddFeatureCount + 1) {
      throw ParseError(line_no, "expected " + std::to_string(kKddFeatureCount + 1) +
                                    " fields, found " + std::to_string(fields.size()));
    }

    RawRecord r;
    r.line = line_no;
    for (std::size_t i = 0; i < kKddFeatureCount; ++i) {
      if (is_symbolic_field(i)) {
        r.values[i] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      const auto f = fields[i];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc{} || ptr != f.data() + f.size() || !std::isfinite(v)) {
        throw ParseError(line_no, "field '" + std::string(kFieldNames[i]) + "' is not numeric: '" +
                                      std::string(f) + "'");
      }
      r.values[i] = v;
    }
    r.protocol_type = fields[1];
    r.service = fields[2];
    r.flag = fields[3];
    r.label = fields[kKddFeatureCount];
    if (r.label.empty()) throw ParseError(line_no, "empty label");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<RawRecord> load_kdd(const std::string& path) {
  // gzread passes uncompressed files through unchanged.
  gzFile file = gzopen(path.c_str(), "rb");
  if (file == nullptr) throw DataError("cannot open dataset '" + path + "'");
  std::string content;
  std::array<char, 1 << 16> buf{};
  int n = 0;
  while ((n = gzread(file, buf.data(), static_cast<unsigned>(buf.size()))) > 0) {
    content.append(buf.data(), static_cast<std::size_t>(n));
  }
  int err = Z_OK;
  const char* msg = gzerror(file, &err);
  const std::string err_text = msg != nullptr ? msg : "";
  gzclose(file);
  if (n < 0 || (err != Z_OK && err != Z_STREAM_END)) {
    throw DataError("error reading '" + path + "': " + err_text);
  }
  std::istringstream in(content);
  return parse_kdd(in);
}

std::string_view to_string(Category c) {
  switch (c) {
    case Category::Normal:
      return "normal";
    case Category::Dos:
      return "dos";
    case Category::Probe:
      return "probe";
    case Category::U2r:
      return "u2r";
    case Category::R2l:
      return "r2l";
  }
  return "unknown";
}

std::optional<Category> parse_category(std::string_view text) {
  const std::string t = lower(trim(text));
  for (auto c : {Category::Normal, Category::Dos, Category::Probe, Category::U2r, Category::R2l}) {
    if (t == to_string(c)) return c;
  }
  return std::nullopt;
}

std::string canonical_label(std::string_view label) {
  std::string_view t = trim(label);
  if (!t.empty() && t.back() == '.') t.remove_suffix(1);
  return std::string(t);
}

CategoryMap::CategoryMap(std::map<std::string, Category> entries) {
  for (auto& [name, cat] : entries) entries_.emplace(canonical_label(name), cat);
}

CategoryMap CategoryMap::parse(std::istream& in) {
  std::map<std::string, Category> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto tab = text.find('\t');
    if (tab == std::string_view::npos) throw ParseError(line_no, "expected name<TAB>category");
    const auto cat = parse_category(text.substr(tab + 1));
    if (!cat) throw ParseError(line_no, "unknown category '" + std::string(text.substr(tab + 1)) + "'");
    const std::string name = canonical_label(text.substr(0, tab));
    if (name.empty()) throw ParseError(line_no, "empty attack name");
    if (!entries.emplace(name, *cat).second) {
      throw ParseError(line_no, "duplicate attack name '" + name + "'");
    }
  }
  return CategoryMap(std::move(entries));
}

CategoryMap CategoryMap::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open category map '" + path + "'");
  return parse(in);
}

const CategoryMap& CategoryMap::standard() {
  static const CategoryMap map = [] {
    std::istringstream in{std::string(kStandardCategories)};
    return parse(in);
  }();
  return map;
}

Category CategoryMap::category_of(std::string_view label) const {
  const auto it = entries_.find(canonical_label(label));
  if (it == entries_.end()) throw UnknownLabel("unknown attack label '" + std::string(label) + "'");
  return it->second;
}

bool CategoryMap::contains(std::string_view label) const {
  return entries_.contains(canonical_label(label));
}

std::optional<int> label_for(Category c) {
  switch (c) {
    case Category::Normal:
      return 1;
    case Category::Dos:
    case Category::Probe:
      return -1;
    case Category::U2r:
    case Category::R2l:
      return std::nullopt;
  }
  return std::nullopt;
}

std::optional<int> map_label(const RawRecord& r, const CategoryMap& cm) {
  return label_for(cm.category_of(r.label));
}

Normalization Normalization::fit(std::span<const Sample> samples) {
  if (samples.empty()) return {};
  const std::size_t dim = samples.front().x.size();
  std::vector<MinMax> ranges(dim, {std::numeric_limits<double>::infinity(),
                                   -std::numeric_limits<double>::infinity()});
  for (const auto& s : samples) {
    if (s.x.size() != dim) throw InvalidInput("inconsistent feature dimension");
    for (std::size_t i = 0; i < dim; ++i) {
      ranges[i].min = std::min(ranges[i].min, s.x[i]);
      ranges[i].max = std::max(ranges[i].max, s.x[i]);
    }
  }
  return Normalization(std::move(ranges));
}

double Normalization::scale(std::size_t feature, double value) const {
  const auto& r = ranges_.at(feature);
  const double span = r.max - r.min;
  if (!(span > 0.0)) return 0.0;
  return std::clamp((value - r.min) / span, 0.0, 1.0);
}

FeatureVector Normalization::apply(std::span<const double> x) const {
  if (x.size() != ranges_.size()) throw InvalidInput("vector dimension does not match normalization");
  FeatureVector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = scale(i, x[i]);
  return out;
}

std::vector<Sample> Normalization::apply(std::span<const Sample> samples) const {
  std::vector<Sample> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back({apply(s.x), s.y, s.id});
  return out;
}

const std::vector<std::string>& default_feature_ids() {
  static const std::vector<std::string> ids = {"src_bytes", "dst_bytes", "count",
                                               "srv_diff_host_rate"};
  return ids;
}

std::vector<std::string> numeric_feature_ids() {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < kKddFeatureCount; ++i) {
    if (!is_symbolic_field(i)) ids.emplace_back(kFieldNames[i]);
  }
  return ids;
}

LabeledDataset select_features(std::span<const RawRecord> records, const CategoryMap& cm,
                               std::span<const std::string> feature_ids) {
  if (feature_ids.empty()) throw InvalidInput("feature selection is empty");
  const auto columns = resolve_columns(feature_ids);

  LabeledDataset ds;
  ds.feature_ids.assign(feature_ids.begin(), feature_ids.end());
  for (std::size_t row = 0; row < records.size(); ++row) {
    const auto& r = records[row];
    const Category cat = cm.category_of(r.label);
    const auto y = label_for(cat);
    if (!y) continue;
    Sample s;
    s.x.reserve(columns.size());
    for (auto c : columns) s.x.push_back(r.values[c]);
    s.y = *y;
    s.id = row;
    ds.samples.push_back(std::move(s));
    ds.categories.push_back(cat);
  }
  return ds;
}

LabeledDataset apply_normalization(const LabeledDataset& ds, const Normalization& norm) {
  LabeledDataset out;
  out.samples = norm.apply(ds.samples);
  out.categories = ds.categories;
  out.feature_ids = ds.feature_ids;
  out.normalization = norm;
  return out;
}

LabeledDataset normalize(const LabeledDataset& ds) {
  return apply_normalization(ds, Normalization::fit(ds.samples));
}

std::vector<Sample> project(std::span<const Sample> samples, std::span<const std::size_t> columns) {
  std::vector<Sample> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    Sample p;
    p.y = s.y;
    p.id = s.id;
    p.x.reserve(columns.size());
    for (auto c : columns) p.x.push_back(s.x.at(c));
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

std::vector<std::size_t> interleave(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  out.reserve(a.size() + b.size());
  for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
    if (i < a.size()) out.push_back(a[i]);
    if (i < b.size()) out.push_back(b[i]);
  }
  return out;
}

std::vector<Sample> rows_to_samples(const LabeledDataset& ds, const std::vector<std::size_t>& rows) {
  std::vector<Sample> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(ds.samples[r]);
  return out;
}

}  // namespace

SamplingPlan::SamplingPlan(const LabeledDataset& ds, std::uint64_t seed) : ds_(&ds), seed_(seed) {
  std::vector<std::size_t> dos;
  std::vector<std::size_t> probe;
  for (std::size_t row = 0; row < ds.samples.size(); ++row) {
    if (ds.samples[row].y > 0) {
      normals_.push_back(row);
    } else if (row < ds.categories.size() && ds.categories[row] == Category::Probe) {
      probe.push_back(row);
    } else {
      dos.push_back(row);
    }
  }
  rng::Engine normal_rng(rng::mix(seed, 1));
  rng::Engine dos_rng(rng::mix(seed, 2));
  rng::Engine probe_rng(rng::mix(seed, 3));
  rng::shuffle(normals_, normal_rng);
  rng::shuffle(dos, dos_rng);
  rng::shuffle(probe, probe_rng);
  anomalies_head_ = interleave(dos, probe);
  std::reverse(dos.begin(), dos.end());
  std::reverse(probe.begin(), probe.end());
  anomalies_tail_ = interleave(dos, probe);
}

std::vector<std::size_t> SamplingPlan::training_rows(std::size_t agent_id, std::size_t n_normal,
                                                     std::size_t n_anomalous) const {
  const std::size_t normal_end = (agent_id + 1) * n_normal;
  const std::size_t anomalous_end = (agent_id + 1) * n_anomalous;
  if (normal_end > normals_.size()) {
    throw InsufficientData("normal pool exhausted: need " + std::to_string(normal_end) + ", have " +
                           std::to_string(normals_.size()));
  }
  if (anomalous_end > anomalies_head_.size()) {
    throw InsufficientData("anomalous pool exhausted: need " + std::to_string(anomalous_end) +
                           ", have " + std::to_string(anomalies_head_.size()));
  }
  std::vector<std::size_t> rows(normals_.begin() + static_cast<std::ptrdiff_t>(agent_id * n_normal),
                                normals_.begin() + static_cast<std::ptrdiff_t>(normal_end));
  rows.insert(rows.end(), anomalies_head_.begin() + static_cast<std::ptrdiff_t>(agent_id * n_anomalous),
              anomalies_head_.begin() + static_cast<std::ptrdiff_t>(anomalous_end));
  return rows;
}

std::size_t test_anomalous_count(std::size_t n_agents) {
  const auto total = static_cast<double>(n_agents * kTestRecordsPerAgent);
  return static_cast<std::size_t>(std::llround(kTestAnomalousShare * total));
}

std::vector<std::size_t> SamplingPlan::test_rows(std::size_t n_agents) const {
  const std::size_t total = n_agents * kTestRecordsPerAgent;
  const std::size_t n_anom = test_anomalous_count(n_agents);
  const std::size_t n_norm = total - n_anom;
  if (n_norm > normals_.size() || n_anom > anomalies_tail_.size()) {
    throw InsufficientData("pool too small for a test draw of " + std::to_string(total) + " records");
  }
  std::vector<std::size_t> rows(anomalies_tail_.begin(),
                                anomalies_tail_.begin() + static_cast<std::ptrdiff_t>(n_anom));
  rows.insert(rows.end(), normals_.rbegin(), normals_.rbegin() + static_cast<std::ptrdiff_t>(n_norm));
  rng::Engine e(rng::mix(seed_, 4));
  rng::shuffle(rows, e);
  return rows;
}

std::vector<Sample> SamplingPlan::training(std::size_t agent_id, std::size_t n_normal,
                                           std::size_t n_anomalous) const {
  return rows_to_samples(*ds_, training_rows(agent_id, n_normal, n_anomalous));
}

std::vector<Sample> SamplingPlan::test(std::size_t n_agents) const {
  return rows_to_samples(*ds_, test_rows(n_agents));
}

void SamplingPlan::check_capacity(std::size_t n_agents, std::size_t n_normal,
                                  std::size_t n_anomalous, std::size_t n_test_agents) const {
  std::set<std::size_t> used;
  if (n_agents > 0) {
    // The last draw validates pool size for all earlier ones.
    training_rows(n_agents - 1, n_normal, n_anomalous);
    for (std::size_t a = 0; a < n_agents; ++a) {
      for (auto r : training_rows(a, n_normal, n_anomalous)) used.insert(r);
    }
  }
  for (auto r : test_rows(n_test_agents)) {
    if (used.contains(r)) {
      throw InsufficientData("training and test draws overlap; the corpus is too small for " +
                             std::to_string(n_agents) + " agents");
    }
  }
}

std::vector<std::size_t> SamplingPlan::unused_rows(std::size_t n_agents, std::size_t n_normal,
                                                   std::size_t n_anomalous,
                                                   std::size_t n_test_agents) const {
  check_capacity(n_agents, n_normal, n_anomalous, n_test_agents);
  std::vector<bool> used(ds_->samples.size(), false);
  for (std::size_t a = 0; a < n_agents; ++a) {
    for (auto r : training_rows(a, n_normal, n_anomalous)) used[r] = true;
  }
  for (auto r : test_rows(n_test_agents)) used[r] = true;
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < used.size(); ++r) {
    if (!used[r]) rows.push_back(r);
  }
  return rows;
}

std::vector<Sample> sample_agent_training(const LabeledDataset& ds, std::size_t n_normal,
                                          std::size_t n_anomalous, std::size_t agent_id,
                                          std::uint64_t seed) {
  return SamplingPlan(ds, seed).training(agent_id, n_normal, n_anomalous);
}

std::vector<Sample> sample_test(const LabeledDataset& ds, std::size_t n_agents, std::uint64_t seed) {
  return SamplingPlan(ds, seed).test(n_agents);
}

FeatureRanking FeatureRanking::with_sizes(std::span<const std::size_t> sizes) const {
  FeatureRanking out;
  for (const auto& row : rows) {
    if (std::find(sizes.begin(), sizes.end(), row.features.size()) != sizes.end()) {
      out.rows.push_back(row);
    }
  }
  return out;
}

FeatureRanking rank_features(std::span<const std::string> base_feature_ids,
                             const SubsetEvaluator& train_eval) {
  if (base_feature_ids.size() < 2) throw InvalidInput("ranking needs at least two features");
  resolve_columns(base_feature_ids);

  FeatureRanking ranking;
  std::vector<std::string> current(base_feature_ids.begin(), base_feature_ids.end());
  const auto base = train_eval(current);
  ranking.rows.push_back({current, base.accuracy, base.detection_rate});

  while (current.size() > 2) {
    std::optional<std::size_t> best;
    EvalResult best_result;
    std::size_t best_field = 0;
    for (std::size_t i = 0; i < current.size(); ++i) {
      std::vector<std::string> subset = current;
      subset.erase(subset.begin() + static_cast<std::ptrdiff_t>(i));
      const auto result = train_eval(subset);
      const std::size_t field = *kdd_field_index(current[i]);
      const bool better = !best || result.accuracy > best_result.accuracy ||
                          (result.accuracy == best_result.accuracy && field > best_field);
      if (better) {
        best = i;
        best_result = result;
        best_field = field;
      }
    }
    current.erase(current.begin() + static_cast<std::ptrdiff_t>(*best));
    ranking.rows.push_back({current, best_result.accuracy, best_result.detection_rate});
  }
  return ranking;
}

}  // namespace wsnids::data
