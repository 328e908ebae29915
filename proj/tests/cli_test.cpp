#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  static fs::path dir() {
    static const fs::path d = [] {
      auto p = fs::temp_directory_path() / ("wsnids_cli_" + std::to_string(::getpid()));
      fs::create_directories(p);
      return p;
    }();
    return d;
  }

  static const std::string& corpus() {
    static const std::string path = [] {
      const auto p = (dir() / "kdd.txt").string();
      const auto cmd = std::string(WSNIDS_SYNTH) + " --records 20000 --seed 1 --out " + p;
      EXPECT_EQ(std::system(cmd.c_str()), 0);
      return p;
    }();
    return path;
  }

  static Result run(const std::string& args) {
    static int n = 0;
    const auto out = dir() / ("stdout_" + std::to_string(n));
    const auto err = dir() / ("stderr_" + std::to_string(n++));
    const auto cmd = std::string(WSNIDS_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
  }

  static std::string out_dir(const std::string& name) { return (dir() / name).string(); }
};

TEST_F(Cli, HelpAndMissingSubcommand) {
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
}

TEST_F(Cli, MissingDatasetIsConfigError) {
  const auto r = run("train-eval --out " + out_dir("none"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--dataset"), std::string::npos) << r.err;
}

TEST_F(Cli, BadConfigurationIsConfigError) {
  EXPECT_EQ(run("train-eval --dataset " + corpus() + " --set colour=blue").code, 1);
  EXPECT_EQ(run("train-eval --dataset " + corpus() + " --set sigma=0").code, 1);
  EXPECT_EQ(run("train-eval --dataset " + corpus() + " --config /nonexistent.conf").code, 1);
  EXPECT_EQ(run("train-eval --dataset " + corpus() + " --n-ids many").code, 1);
}

TEST_F(Cli, DataErrors) {
  EXPECT_EQ(run("train-eval --dataset /nonexistent/kdd.txt").code, 2);
  const auto bad = (dir() / "bad.txt").string();
  std::ofstream(bad) << "0,tcp,http,SF,1,2,normal.\n";
  EXPECT_EQ(run("train-eval --dataset " + bad).code, 2);
  const auto tiny = (dir() / "tiny.txt").string();
  {
    std::ifstream in(corpus());
    std::ofstream out(tiny);
    std::string line;
    for (int i = 0; i < 300 && std::getline(in, line); ++i) out << line << '\n';
  }
  EXPECT_EQ(run("train-eval --dataset " + tiny).code, 2);
}

TEST_F(Cli, ProtocolErrorExitCode) {
  const auto r = run("train-eval --dataset " + corpus() + " --seed 1 --set max_passes=1");
  EXPECT_EQ(r.code, 3) << r.err;
}

TEST_F(Cli, TrainEvalWritesReproducibleMetrics) {
  const auto a = out_dir("te_a"), b = out_dir("te_b");
  const auto ra = run("train-eval --dataset " + corpus() + " --seed 1-5 --out " + a);
  ASSERT_EQ(ra.code, 0) << ra.err;
  ASSERT_EQ(run("train-eval --dataset " + corpus() + " --seed 1,2,3,4,5 --out " + b).code, 0);
  const auto text = slurp(fs::path(a) / "metrics.csv");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 6);
  EXPECT_EQ(text, slurp(fs::path(b) / "metrics.csv"));
}

TEST_F(Cli, ConfigFileWithFlagOverride) {
  const auto conf = (dir() / "run.conf").string();
  std::ofstream(conf) << "seeds=1-3\nn_ids=4\n";
  const auto o = out_dir("conf");
  ASSERT_EQ(run("train-eval --dataset " + corpus() + " --config " + conf + " --n-ids 6 --out " + o).code, 0);
  const auto text = slurp(fs::path(o) / "metrics.csv");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
  EXPECT_NE(text.find("\n1,6,"), std::string::npos) << text;
}

TEST_F(Cli, CompareAndRank) {
  const auto o = out_dir("cmp");
  ASSERT_EQ(run("compare --dataset " + corpus() + " --seed 1 --set sweep=4,8 --out " + o).code, 0);
  const auto cmp = slurp(fs::path(o) / "comparison.csv");
  EXPECT_EQ(std::count(cmp.begin(), cmp.end(), '\n'), 3);
  ASSERT_EQ(run("rank-features --dataset " + corpus() +
                " --seed 1 --set rank_pool=src_bytes,dst_bytes,count,srv_diff_host_rate --out " + o)
                .code,
            0);
  const auto rank = slurp(fs::path(o) / "ranking.csv");
  EXPECT_EQ(rank.substr(0, rank.find('\n')), "n_features,features,accuracy,detection_rate");
  EXPECT_EQ(std::count(rank.begin(), rank.end(), '\n'), 4);
}

TEST_F(Cli, SimulateWritesThreeTables) {
  const auto o = out_dir("sim");
  const auto r = run("simulate --dataset " + corpus() + " --seed 2 --category-map " +
                     std::string(WSNIDS_DATA_DIR) + "/kdd_categories.tsv --out " + o);
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"metrics.csv", "events.csv", "energy.csv"}) EXPECT_TRUE(fs::exists(fs::path(o) / f)) << f;
  const auto energy = slurp(fs::path(o) / "energy.csv");
  EXPECT_EQ(std::count(energy.begin(), energy.end(), '\n'), 101);
  const auto events = slurp(fs::path(o) / "events.csv");
  EXPECT_EQ(events.substr(0, events.find('\n')), "seed,event,type,actor,suspect,verdict,db_version");
}

}  // namespace
