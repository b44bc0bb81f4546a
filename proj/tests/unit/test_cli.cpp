#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cauim/bounds.hpp"
#include "cauim/cli/app.hpp"
#include "cauim/cli/experiment.hpp"
#include "cauim/cli/generate.hpp"
#include "cauim/hypergraph.hpp"

using namespace cauim;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("cauim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  // Small graph plus attributes, shared by the experiment tests.
  void make_inputs() {
    ASSERT_EQ(run({"gen", "--nodes", "60", "--edges", "6", "--dim", "3", "--seed", "4", "--graph-out", path("g.txt"),
                   "--attrs-out", path("a.csv")}),
              0)
        << err_.str();
    ASSERT_EQ(run({"estimate", "--graph", path("g.txt"), "--attrs", path("a.csv"), "--out", path("ite.csv")}), 0)
        << err_.str();
  }

  std::vector<std::string> experiment_args() const {
    return {"--graph", path("g.txt"), "--ite", path("ite.csv"), "--k", "4", "--p", "0.05", "--reps", "3",
            "--select-T", "20", "--eval-T", "20", "--seed", "9"};
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_F(Cli, GenDefaultScale) {
  ASSERT_EQ(run({"gen", "--graph-out", path("g.txt"), "--attrs-out", path("a.csv")}), 0) << err_.str();
  const Hypergraph g = load_hypergraph(path("g.txt"));
  EXPECT_EQ(g.node_count(), 4400u);
  EXPECT_EQ(g.edge_count(), 120u);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    EXPECT_GE(g.degree(v), 1u);
    EXPECT_LE(g.degree(v), 3u);
  }
}

TEST_F(Cli, GenTinyAndReplay) {
  ASSERT_EQ(run({"gen", "--nodes", "10", "--edges", "4", "--graph-out", path("g1.txt"), "--attrs-out", path("a1.csv")}),
            0);
  ASSERT_EQ(run({"gen", "--nodes", "10", "--edges", "4", "--graph-out", path("g2.txt"), "--attrs-out", path("a2.csv")}),
            0);
  const Hypergraph g = load_hypergraph(path("g1.txt"));
  EXPECT_EQ(g.node_count(), 10u);
  EXPECT_EQ(g.edge_count(), 4u);
  EXPECT_EQ(slurp(path("g1.txt")), slurp(path("g2.txt")));
  EXPECT_EQ(slurp(path("a1.csv")), slurp(path("a2.csv")));
  ASSERT_EQ(run({"gen", "--nodes", "10", "--edges", "4", "--seed", "2", "--graph-out", path("g3.txt"), "--attrs-out",
                 path("a3.csv")}),
            0);
  EXPECT_NE(slurp(path("a1.csv")), slurp(path("a3.csv")));
}

TEST_F(Cli, SchemaHeaders) {
  make_inputs();
  auto args = experiment_args();
  args.insert(args.begin(), "select");
  for (const char* extra : {"--method", "cauim-celf,random", "--results-out"}) args.push_back(extra);
  args.push_back(path("r.csv"));
  args.push_back("--trace-out");
  args.push_back(path("t.csv"));
  args.push_back("--timing-out");
  args.push_back(path("tm.csv"));
  ASSERT_EQ(run(args), 0) << err_.str();
  EXPECT_EQ(lines(slurp(path("r.csv")))[0], "# cauim-results v1");
  EXPECT_EQ(lines(slurp(path("r.csv")))[1], "method,seed_count,mean,std,reps");
  EXPECT_EQ(lines(slurp(path("t.csv")))[0], "# cauim-trace v1");
  EXPECT_EQ(lines(slurp(path("t.csv")))[1], "method,rep,step,node,gain,sigma,evals");
  EXPECT_EQ(lines(slurp(path("tm.csv")))[1], "method,rep,seconds");
  EXPECT_EQ(first_line(slurp(path("ite.csv"))), "# cauim-ite v1");
  EXPECT_EQ(first_line(slurp(path("a.csv"))), "# cauim-attributes v1");
  EXPECT_EQ(first_line(slurp(path("g.txt"))), "# cauim-hypergraph v1");
  // 2 methods x 4 seed counts, 2 methods x 3 reps x 4 steps.
  EXPECT_EQ(lines(slurp(path("r.csv"))).size(), 2u + 8u);
  EXPECT_EQ(lines(slurp(path("t.csv"))).size(), 2u + 24u);
}

TEST_F(Cli, SelectReplaysAcrossWorkerCounts) {
  make_inputs();
  std::string previous;
  for (const char* workers : {"1", "3", "1"}) {
    auto args = experiment_args();
    args.insert(args.begin(), "select");
    for (const std::string& extra : std::vector<std::string>{"--method", "cauim-greedy,cauim-celf,celf-count,random", "--workers", workers,
                              "--results-out", path("r.csv"), "--trace-out", path("t.csv")}) {
      args.push_back(extra);
    }
    ASSERT_EQ(run(args), 0) << err_.str();
    const std::string now = slurp(path("r.csv")) + slurp(path("t.csv"));
    if (!previous.empty()) EXPECT_EQ(now, previous);
    previous = now;
  }
}

TEST_F(Cli, SelectFromAttributesEstimates) {
  make_inputs();
  auto args = experiment_args();
  args.insert(args.begin(), "select");
  args[3] = "--attrs";  // replace --ite with the attribute file
  args[4] = path("a.csv");
  args.push_back("--results-out");
  args.push_back(path("r1.csv"));
  ASSERT_EQ(run(args), 0) << err_.str();
  auto direct = experiment_args();
  direct.insert(direct.begin(), "select");
  direct.push_back("--results-out");
  direct.push_back(path("r2.csv"));
  ASSERT_EQ(run(direct), 0) << err_.str();
  EXPECT_EQ(slurp(path("r1.csv")), slurp(path("r2.csv")));
}

TEST_F(Cli, NoiseSweepAtZeroEqualsSelect) {
  make_inputs();
  auto sel = experiment_args();
  sel.insert(sel.begin(), "select");
  sel.push_back("--results-out");
  sel.push_back(path("r.csv"));
  ASSERT_EQ(run(sel), 0) << err_.str();
  auto sw = experiment_args();
  sw.insert(sw.begin(), "sweep");
  for (const std::string& extra : std::vector<std::string>{"--param", "noise", "--grid", "0,3", "--out", path("s.csv")}) sw.push_back(extra);
  ASSERT_EQ(run(sw), 0) << err_.str();
  const auto r = lines(slurp(path("r.csv")));
  const auto s = lines(slurp(path("s.csv")));
  EXPECT_EQ(s[1], "param,value,method,seed_count,mean,std,reps");
  ASSERT_EQ(s.size(), 2u + 8u);
  for (std::size_t i = 2; i < r.size(); ++i) EXPECT_EQ("noise,0," + r[i], s[i]);
  EXPECT_NE(s[2].substr(8), s[6].substr(8));  // σ = 3 rows differ
}

TEST_F(Cli, IterSweepRecordsTime) {
  make_inputs();
  auto sw = experiment_args();
  sw.insert(sw.begin(), "sweep");
  for (const std::string& extra : std::vector<std::string>{"--param", "iter", "--out", path("s.csv"), "--timing-out", path("st.csv")}) {
    sw.push_back(extra);
  }
  ASSERT_EQ(run(sw), 0) << err_.str();
  const auto t = lines(slurp(path("st.csv")));
  ASSERT_EQ(t.size(), 2u + 3u);
  EXPECT_EQ(t[1], "param,value,seconds");
  EXPECT_EQ(t[2].rfind("iter,25,", 0), 0u);
  EXPECT_EQ(t[4].rfind("iter,100,", 0), 0u);
}

TEST_F(Cli, DefaultGrids) {
  const auto noise = cli::default_grid(cli::SweepParam::Noise);
  EXPECT_EQ(noise, (std::vector<double>{0, 2, 4, 6, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20}));
  EXPECT_EQ(cli::default_grid(cli::SweepParam::Iter), (std::vector<double>{25, 50, 100}));
  const auto p = cli::default_grid(cli::SweepParam::P);
  for (double v : {0.009, 0.01, 0.012}) EXPECT_NE(std::find(p.begin(), p.end(), v), p.end());
}

TEST_F(Cli, ConfigFileWithOverride) {
  make_inputs();
  {
    std::ofstream cfg(path("run.cfg"));
    cfg << "# experiment\n"
        << "graph = " << path("g.txt") << "\n"
        << "ite = " << path("ite.csv") << "\n"
        << "k = 3\nreps = 2\nselect-T = 10\neval-T = 10\nmethod = random\n";
  }
  ASSERT_EQ(run({"select", "--config", path("run.cfg"), "--results-out", path("r.csv")}), 0) << err_.str();
  EXPECT_EQ(lines(slurp(path("r.csv"))).size(), 2u + 3u);
  ASSERT_EQ(run({"select", "--config", path("run.cfg"), "--k", "2", "--results-out", path("r.csv")}), 0);
  EXPECT_EQ(lines(slurp(path("r.csv"))).size(), 2u + 2u);
  {
    std::ofstream bad(path("bad.cfg"));
    bad << "no-such-option = 1\n";
  }
  EXPECT_EQ(run({"select", "--config", path("bad.cfg"), "--graph", path("g.txt"), "--ite", path("ite.csv"),
                 "--results-out", path("r.csv")}),
            cli::kExitUsage);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run({}), cli::kExitUsage);
  EXPECT_EQ(run({"bogus"}), cli::kExitUsage);
  EXPECT_EQ(run({"gen"}), cli::kExitUsage);
  EXPECT_EQ(run({"gen", "--help"}), cli::kExitOk);
  EXPECT_EQ(run({"estimate", "--graph", path("missing.txt"), "--attrs", path("a.csv"), "--out", path("o.csv")}),
            cli::kExitUsage);
  make_inputs();
  auto args = experiment_args();
  args.insert(args.begin(), "select");
  args.push_back("--results-out");
  args.push_back(path("r.csv"));
  auto bad_k = args;
  bad_k.push_back("--k");
  bad_k.push_back("0");
  EXPECT_EQ(run(bad_k), cli::kExitUsage);
  auto bad_method = args;
  bad_method.push_back("--method");
  bad_method.push_back("magic");
  EXPECT_EQ(run(bad_method), cli::kExitUsage);
  auto both = args;
  both.push_back("--attrs");
  both.push_back(path("a.csv"));
  EXPECT_EQ(run(both), cli::kExitUsage);
}

TEST_F(Cli, VerifyPaths) {
  ASSERT_EQ(run({"verify", "--count", "10", "--report-dir", path("rep")}), cli::kExitOk) << out_.str();
  EXPECT_NE(out_.str().find("== theorem1"), std::string::npos);
  EXPECT_NE(out_.str().find("== theorem2"), std::string::npos);
  EXPECT_TRUE(fs::exists(path("rep/theorem1.csv")));

  ASSERT_EQ(run({"verify", "--count", "10", "--gamma", "0"}), cli::kExitOk);
  EXPECT_EQ(out_.str().find("== theorem2"), std::string::npos);

  ASSERT_EQ(run({"verify", "--count", "10", "--tau-all-one", "--report-dir", path("ones")}), cli::kExitOk);
  const auto rows = lines(slurp(path("ones/theorem1.csv")));
  for (std::size_t i = 2; i < rows.size(); ++i) EXPECT_NE(rows[i].find(",1,1,"), std::string::npos) << rows[i];
}

TEST_F(Cli, VerifyInstanceAndBudget) {
  ASSERT_EQ(run({"verify", "--count", "1", "--gamma", "0"}), 0);
  // Build an instance directory through the library, then check it from the CLI.
  InstanceSpec spec;
  const Instance inst = random_instance(spec, 3);
  save_instance(path("inst"), inst);
  EXPECT_EQ(run({"verify", "--instance", path("inst")}), cli::kExitOk) << err_.str();
  EXPECT_NE(out_.str().find("theorem1: holds"), std::string::npos);
  EXPECT_EQ(run({"verify", "--instance", path("inst"), "--budget", "1"}), cli::kExitBudget);
}
