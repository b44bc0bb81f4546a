#include <gtest/gtest.h>

#include <algorithm>
#include <deque>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>

#include "cauim/bounds.hpp"
#include "cauim/error.hpp"
#include "cauim/exact.hpp"
#include "cauim/selection.hpp"
#include "oracle/oracle.hpp"
#include "support.hpp"

using namespace cauim;
using testing_support::config;

namespace {

ExactOracle static_oracle(const std::vector<double>& tau) {
  // Nodes in one hyperedge but p = 0: gains are the nodes' own weights.
  std::vector<NodeId> all(tau.size());
  std::iota(all.begin(), all.end(), NodeId{0});
  static std::deque<Hypergraph> keep;  // oracles reference their graph
  keep.emplace_back(tau.size(), std::vector<std::vector<NodeId>>{all});
  return ExactOracle(keep.back(), tau, config(DiffusionModel::GIC, 0.0, 3));
}

void expect_valid(const SelectionTrace& t, std::size_t k) {
  EXPECT_EQ(t.seeds.size(), k);
  EXPECT_EQ(std::set<NodeId>(t.seeds.begin(), t.seeds.end()).size(), t.seeds.size());
  EXPECT_EQ(t.evals.size(), t.seeds.size());
  for (std::size_t e : t.evals) EXPECT_GE(e, 1u);
}

}  // namespace

TEST(Selection, StaticGainsPickLargestWeights) {
  const std::vector<double> tau{1.0, 5.0, 2.0};
  for (auto select : {greedy_select, celf_select}) {
    ExactOracle one = static_oracle(tau);
    EXPECT_EQ(select(one, 1, {}).seeds, (std::vector<NodeId>{1}));
    ExactOracle two = static_oracle(tau);
    const SelectionTrace t = select(two, 2, {});
    EXPECT_EQ(t.seeds, (std::vector<NodeId>{1, 2}));
    EXPECT_EQ(t.gains, (std::vector<double>{5.0, 2.0}));
    EXPECT_EQ(t.sigma_curve, (std::vector<double>{5.0, 7.0}));
    expect_valid(t, 2);
  }
}

TEST(Selection, McOracleStaticGains) {
  const Hypergraph g(3, {{0, 1, 2}});
  McOracle oracle(g, {1.0, 5.0, 2.0}, config(DiffusionModel::SICP, 0.0, 3), 10, 1);
  EXPECT_EQ(greedy_select(oracle, 2).seeds, (std::vector<NodeId>{1, 2}));
}

TEST(Selection, CelfMatchesGreedyWithFewerEvalsOnStaticGains) {
  const std::vector<double> tau{0.5, -1.0, 3.0, 3.0, 2.0, 0.1, 7.0, -4.0};
  ExactOracle a = static_oracle(tau);
  ExactOracle b = static_oracle(tau);
  const SelectionTrace greedy = greedy_select(a, 5);
  const SelectionTrace celf = celf_select(b, 5);
  EXPECT_EQ(greedy.seeds, celf.seeds);
  EXPECT_EQ(greedy.seeds, (std::vector<NodeId>{6, 2, 3, 4, 0}));  // tie 2/3 by id
  EXPECT_LE(celf.total_evals(), greedy.total_evals());
}

TEST(Selection, NegativeHubIsAvoided) {
  // Hub 0 touches everyone and carries a large negative effect.
  const Hypergraph g(8, {{0, 1, 2}, {0, 3, 4}, {0, 5, 6}, {0, 7}});
  const std::vector<double> tau{-10.0, 1.0, 2.0, 0.5, 1.5, 3.0, 0.2, 1.0};
  for (auto model : {DiffusionModel::GIC, DiffusionModel::SICP}) {
    const DiffusionConfig cfg = config(model, 0.5, 2);
    ExactOracle oracle(g, tau, cfg);
    const SelectionTrace t = greedy_select(oracle, 3);
    EXPECT_EQ(std::count(t.seeds.begin(), t.seeds.end(), NodeId{0}), 0);
    const auto best = oracle::best_subset(g, tau, cfg, 3);
    EXPECT_EQ(std::count(best.begin(), best.end(), NodeId{0}), 0);
    ExactEngine engine(g, cfg);
    const OptimalSet opt = brute_force_optimal(engine, tau, 3);
    EXPECT_EQ(opt.seeds, best);
    EXPECT_LE(exact_spread(g, tau, t.seeds, cfg), opt.sigma + 1e-12);
  }
}

TEST(Selection, CelfEqualsGreedyUnderSubmodularity) {
  InstanceSpec spec;
  spec.tau_mode = TauMode::Nonnegative;
  spec.models = {DiffusionModel::GIC};  // submodular for nonnegative weights
  for (std::uint64_t i = 0; i < 50; ++i) {
    const Instance inst = random_instance(spec, 700 + i);
    ExactEngine engine(inst.graph, inst.cfg);
    ExactOracle a(engine, inst.tau_hat);
    ExactOracle b(engine, inst.tau_hat);
    const SelectionTrace greedy = greedy_select(a, inst.k);
    const SelectionTrace celf = celf_select(b, inst.k);
    EXPECT_EQ(greedy.seeds, celf.seeds) << "instance " << i;
    EXPECT_LE(celf.total_evals(), greedy.total_evals());
    expect_valid(celf, inst.k);
  }
}

TEST(Selection, CelfAgreementWithMixedWeightsIsReported) {
  std::size_t agree = 0;
  const std::size_t count = 50;
  for (std::uint64_t i = 0; i < count; ++i) {
    const Instance inst = random_instance({}, 1700 + i);
    ExactEngine engine(inst.graph, inst.cfg);
    ExactOracle a(engine, inst.tau_hat);
    ExactOracle b(engine, inst.tau_hat);
    agree += greedy_select(a, inst.k).seeds == celf_select(b, inst.k).seeds;
  }
  // Not asserted: lazy evaluation has no guarantee without submodularity.
  RecordProperty("celf_greedy_agreement", std::to_string(agree) + "/" + std::to_string(count));
  std::cout << "celf/greedy agreement with mixed weights: " << agree << "/" << count << '\n';
}

TEST(Selection, UnitCountIsAllOnes) {
  const std::vector<double> tau{3.0, -2.0, 0.5};
  EXPECT_EQ(objective_weights(Objective::UnitCount, tau), (std::vector<double>{1.0, 1.0, 1.0}));
  EXPECT_EQ(objective_weights(Objective::CausalITE, tau), tau);
  EXPECT_EQ(parse_objective("count"), Objective::UnitCount);
  EXPECT_EQ(parse_objective("causal"), Objective::CausalITE);
  EXPECT_THROW(parse_objective("ite"), Error);
}

TEST(Selection, RandomSelection) {
  const Hypergraph g(6, {{0, 2}, {2, 3, 5}});
  const SelectionTrace all = random_select(g, 4, 9);
  EXPECT_EQ(std::set<NodeId>(all.seeds.begin(), all.seeds.end()), (std::set<NodeId>{0, 2, 3, 5}));
  EXPECT_EQ(random_select(g, 3, 9).seeds, random_select(g, 3, 9).seeds);
  for (std::uint64_t s = 0; s < 200; ++s) {
    for (NodeId v : random_select(g, 2, s).seeds) EXPECT_TRUE(v != 1 && v != 4);
  }
  EXPECT_THROW(random_select(g, 5, 1), Error);
}

TEST(Selection, BruteForceTrivialCases) {
  const Instance inst = random_instance({}, 4242);
  const std::size_t n = inst.graph.node_count();
  ExactEngine engine(inst.graph, inst.cfg);
  std::vector<NodeId> all(n);
  std::iota(all.begin(), all.end(), NodeId{0});
  const OptimalSet full = brute_force_optimal(engine, inst.tau_hat, n);
  EXPECT_EQ(full.seeds, all);
  EXPECT_NEAR(full.sigma, exact_spread(inst.graph, inst.tau_hat, all, inst.cfg), 1e-12);

  DiffusionConfig still = inst.cfg;
  still.p = 0.0;
  ExactEngine quiet(inst.graph, still);
  const OptimalSet top = brute_force_optimal(quiet, inst.tau_hat, 2);
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return inst.tau_hat[a] > inst.tau_hat[b]; });
  std::vector<NodeId> expect{order[0], order[1]};
  std::sort(expect.begin(), expect.end());
  EXPECT_EQ(top.seeds, expect);
}

TEST(Selection, BruteForceTenNodeFixture) {
  InstanceSpec spec;
  spec.min_nodes = spec.max_nodes = 10;
  spec.k_values = {3};
  spec.horizons = {2};
  const Instance inst = random_instance(spec, 10);
  ExactEngine engine(inst.graph, inst.cfg);
  const OptimalSet opt = brute_force_optimal(engine, inst.tau_hat, 3);
  double value = 0.0;
  const auto best = oracle::best_subset(inst.graph, inst.tau_hat, inst.cfg, 3, &value);
  EXPECT_EQ(opt.seeds, best);
  EXPECT_NEAR(opt.sigma, value, 1e-9);
}

TEST(Selection, GreedyNeverBeatsOptimum) {
  for (std::uint64_t i = 0; i < 40; ++i) {
    const Instance inst = random_instance({}, 300 + i);
    ExactEngine engine(inst.graph, inst.cfg);
    ExactOracle oracle(engine, inst.tau_hat);
    const SelectionTrace t = greedy_select(oracle, inst.k);
    EXPECT_LE(t.sigma_curve.back(), brute_force_optimal(engine, inst.tau_hat, inst.k).sigma + 1e-12);
  }
}

TEST(Selection, StopOnNegative) {
  const std::vector<double> tau{-1.0, 2.0, -3.0};
  ExactOracle a = static_oracle(tau);
  GreedyOptions options;
  options.stop_on_negative = true;
  EXPECT_EQ(greedy_select(a, 3, options).seeds, (std::vector<NodeId>{1}));
  ExactOracle b = static_oracle(tau);
  EXPECT_EQ(celf_select(b, 3, options).seeds, (std::vector<NodeId>{1}));
  ExactOracle c = static_oracle(tau);
  EXPECT_EQ(greedy_select(c, 3).seeds, (std::vector<NodeId>{1, 0, 2}));
}

TEST(Selection, CandidatePoolAndLimits) {
  const std::vector<double> tau{1.0, 5.0, 2.0, 4.0};
  ExactOracle a = static_oracle(tau);
  GreedyOptions options;
  options.candidates = {2, 0, 2};
  EXPECT_EQ(greedy_select(a, 2, options).seeds, (std::vector<NodeId>{2, 0}));
  ExactOracle b = static_oracle(tau);
  EXPECT_THROW(celf_select(b, 3, options), Error);
  options.candidates = {9};
  EXPECT_THROW(greedy_select(b, 1, options), Error);
}

TEST(Selection, SetFunctionOracle) {
  // f(S) = 10 - (|S| - 2)^2 peaks at two seeds, f(∅) = 6.
  SetFunctionOracle oracle(5, [](std::span<const NodeId> s) {
    const double k = static_cast<double>(s.size());
    return 10.0 - (k - 2.0) * (k - 2.0);
  });
  EXPECT_EQ(oracle.value(), 6.0);
  const SelectionTrace t = greedy_select(oracle, 3);
  EXPECT_EQ(t.gains, (std::vector<double>{3.0, 1.0, -1.0}));
}

TEST(Selection, McSelectionIsDeterministic) {
  const Instance inst = random_instance({}, 55);
  DiffusionConfig cfg = inst.cfg;
  cfg.seed = 3;
  McOracle a(inst.graph, inst.tau_hat, cfg, 200, 1);
  McOracle b(inst.graph, inst.tau_hat, cfg, 200, 3);
  const SelectionTrace ta = celf_select(a, inst.k);
  const SelectionTrace tb = celf_select(b, inst.k);
  EXPECT_EQ(ta.seeds, tb.seeds);
  EXPECT_EQ(ta.gains, tb.gains);
  EXPECT_EQ(ta.evals, tb.evals);
  // The oracle value of the chosen set is the same sample average.
  const auto prefixes = evaluate_prefixes(inst.graph, inst.tau_hat, ta.seeds, cfg, 200, 1);
  for (std::size_t i = 0; i < prefixes.size(); ++i) EXPECT_NEAR(prefixes[i].mean, ta.sigma_curve[i], 1e-9);
}

TEST(Selection, TraceCsv) {
  const Hypergraph g(3, {{0, 1, 2}}, {"x", "y", "z"});
  SelectionTrace t;
  t.seeds = {2, 0};
  t.gains = {1.5, 0.25};
  t.evals = {3, 1};
  t.sigma_curve = {1.5, 1.75};
  std::ostringstream out;
  write_trace_header(out);
  write_trace_rows(out, g, t, 4);
  EXPECT_EQ(out.str(), "rep,step,node,gain,sigma,evals\n4,1,z,1.5,1.5,3\n4,2,x,0.25,1.75,1\n");
  std::ostringstream rnd;
  write_trace_rows(rnd, g, random_select(g, 1, 1), 0);
  EXPECT_NE(rnd.str().find(",,,0\n"), std::string::npos);
}
