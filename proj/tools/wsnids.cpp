#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>

#include "wsnids/error.hpp"
#include "wsnids/experiment.hpp"

namespace {

using namespace wsnids;

enum ExitCode { kOk = 0, kConfig = 1, kData = 2, kProtocol = 3 };

struct Flags {
  std::string dataset;
  std::string category_map;
  std::string config;
  std::string seeds;
  std::string n_ids;
  std::string out = ".";
  std::vector<std::string> overrides;
};

std::ofstream open_out(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path.string());
  return f;
}

exp::ExperimentConfig resolve(const Flags& f) {
  exp::ExperimentConfig cfg = f.config.empty() ? exp::ExperimentConfig{} : exp::ExperimentConfig::load(f.config);
  for (const auto& kv : f.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!f.dataset.empty()) cfg.dataset = f.dataset;
  if (!f.category_map.empty()) cfg.category_map = f.category_map;
  if (!f.seeds.empty()) cfg.set("seeds", f.seeds);
  if (!f.n_ids.empty()) cfg.set("n_ids", f.n_ids);
  cfg.validate();
  return cfg;
}

void train_eval(const Flags& f) {
  const auto cfg = resolve(f);
  const auto corpus = exp::Corpus::load(cfg);
  const auto rows = exp::run_train_eval(cfg, corpus.select(cfg.features));
  auto out = open_out(f.out, "metrics.csv");
  exp::write_metrics_csv(out, rows);
  for (const auto& r : rows) {
    std::cout << "seed " << r.seed << " N=" << r.n_ids << " accuracy " << r.metrics.accuracy
              << " detection " << r.metrics.detection_rate.value_or(0.0) << " false-positive "
              << r.metrics.false_positive_rate.value_or(0.0) << " byte ratio " << r.byte_ratio() << '\n';
  }
}

void compare(const Flags& f) {
  const auto cfg = resolve(f);
  const auto corpus = exp::Corpus::load(cfg);
  const auto rows = exp::run_compare(cfg, corpus.select(cfg.features));
  auto out = open_out(f.out, "comparison.csv");
  exp::write_comparison_csv(out, rows);
  for (const auto& r : rows) {
    std::cout << "seed " << r.seed << " N=" << r.n_ids << " distributed " << r.distributed.accuracy
              << " centralized " << r.centralized.accuracy << '\n';
  }
}

void simulate(const Flags& f) {
  const auto cfg = resolve(f);
  const auto corpus = exp::Corpus::load(cfg);
  const auto runs = exp::run_simulate(cfg, corpus.select(cfg.features));
  std::vector<exp::MetricsRow> rows;
  for (const auto& r : runs) rows.push_back(r.row);
  auto metrics = open_out(f.out, "metrics.csv");
  exp::write_metrics_csv(metrics, rows);
  auto events = open_out(f.out, "events.csv");
  exp::write_events_csv(events, runs);
  auto energy = open_out(f.out, "energy.csv");
  exp::write_energy_csv(energy, runs);
  for (const auto& r : runs) {
    std::cout << "seed " << r.row.seed << " isolated " << r.isolated.size() << " of "
              << r.compromised.size() << " compromised, signatures learned "
              << r.row.signatures_learned << ", re-elections " << r.row.reelections << '\n';
  }
}

void rank(const Flags& f) {
  const auto cfg = resolve(f);
  const auto corpus = exp::Corpus::load(cfg);
  const auto ranking = exp::run_rank_features(cfg, corpus);
  auto out = open_out(f.out, "ranking.csv");
  exp::write_ranking_csv(out, ranking);
  for (const auto& r : ranking.rows) {
    std::cout << r.features.size() << " features: accuracy " << r.accuracy << " detection "
              << r.detection_rate << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed SVM intrusion detection experiments for clustered sensor networks"};
  app.require_subcommand(1);
  Flags flags;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--dataset", flags.dataset, "KDD'99 records, plain or gzip");
    sub->add_option("--category-map", flags.category_map, "attack name to category table");
    sub->add_option("--config", flags.config, "key=value configuration file");
    sub->add_option("--seed", flags.seeds, "seed list, e.g. 1,2,3 or 1-5");
    sub->add_option("--n-ids", flags.n_ids, "IDS agent count or 'auto'");
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--set", flags.overrides, "extra key=value overrides");
  };

  std::function<void(const Flags&)> action;
  auto bind = [&](const char* name, const char* help, void (*fn)(const Flags&)) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub);
    sub->callback([&action, fn] { action = fn; });
  };
  bind("train-eval", "train to consensus and evaluate, writes metrics.csv", train_eval);
  bind("compare", "distributed against centralized over the N sweep, writes comparison.csv", compare);
  bind("simulate", "traffic replay through detection, writes metrics, events and energy csv", simulate);
  bind("rank-features", "backward feature elimination, writes ranking.csv", rank);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    action(flags);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const InvalidInput& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const TopologyError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const ProtocolError& e) {
    std::cerr << "protocol error: " << e.what() << '\n';
    return kProtocol;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kProtocol;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
  return kOk;
}
