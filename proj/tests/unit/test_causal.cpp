#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "cauim/causal.hpp"
#include "cauim/cli/generate.hpp"
#include "cauim/error.hpp"
#include "support.hpp"

using namespace cauim;
using testing_support::graph_of;

namespace {

Hypergraph book_graph(std::size_t nodes, std::size_t edges, std::uint64_t seed = 3) {
  cli::AuthorBookParams params;
  params.nodes = nodes;
  params.edges = edges;
  return cli::generate_author_book(params, seed);
}

double correlation(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

NodeCausalTable manual_table(std::vector<double> x, std::vector<std::uint8_t> t, std::vector<double> y) {
  NodeCausalTable table;
  table.dim = 1;
  table.x = std::move(x);
  table.t = std::move(t);
  table.y_obs = std::move(y);
  table.tau_hat.assign(table.t.size(), 0.0);
  return table;
}

}  // namespace

TEST(Causal, NullEffectGivesZeroTau) {
  const Hypergraph g = book_graph(200, 10);
  SimulationParams params = SimulationParams::defaults(4);
  std::fill(params.effect.begin(), params.effect.end(), 0.0);
  std::fill(params.spillover.begin(), params.spillover.end(), 0.0);
  params.effect_intercept = 0.0;
  const NodeCausalTable table = simulate_outcomes(g, 4, params, 1);
  for (double t : *table.tau_true) EXPECT_EQ(t, 0.0);
}

TEST(Causal, IsolatedNodeHasNoInterference) {
  const Hypergraph g(4, {{1, 2, 3}});
  SimulationParams params = SimulationParams::defaults(3);
  std::fill(params.spillover.begin(), params.spillover.end(), 0.0);
  const NodeCausalTable table = simulate_outcomes(g, 3, params, 9);
  double expect = params.effect_intercept;
  for (std::size_t k = 0; k < 3; ++k) expect += params.effect[k] * table.covariates(0)[k];
  EXPECT_DOUBLE_EQ((*table.tau_true)[0], expect);
}

TEST(Causal, SimulationIsReproducible) {
  const Hypergraph g = book_graph(100, 8);
  const auto params = SimulationParams::defaults(10);
  const NodeCausalTable a = simulate_outcomes(g, 10, params, 42);
  const NodeCausalTable b = simulate_outcomes(g, 10, params, 42);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.t, b.t);
  EXPECT_EQ(a.y_obs, b.y_obs);
  EXPECT_EQ(*a.tau_true, *b.tau_true);
  const NodeCausalTable c = simulate_outcomes(g, 10, params, 43);
  EXPECT_NE(a.y_obs, c.y_obs);
}

TEST(Causal, ObservedOutcomeIsObservedArm) {
  const Hypergraph g = book_graph(150, 9);
  SimulationParams params = SimulationParams::defaults(2);
  params.noise_scale = 0.0;
  params.baseline_intercept = 1.5;
  const NodeCausalTable table = simulate_outcomes(g, 2, params, 5);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const auto x = table.covariates(v);
    const double y0 = 1.5 + params.baseline[0] * x[0] + params.baseline[1] * x[1];
    EXPECT_NEAR(table.y_obs[v], table.t[v] ? y0 + (*table.tau_true)[v] : y0, 1e-12);
  }
}

TEST(Causal, SimulationValidatesParams) {
  const Hypergraph g = book_graph(20, 3);
  SimulationParams params = SimulationParams::defaults(3);
  EXPECT_THROW(simulate_outcomes(g, 4, params, 1), Error);
  params.noise_scale = -1.0;
  EXPECT_THROW(simulate_outcomes(g, 3, params, 1), Error);
}

TEST(Causal, EnvironmentSummaryDefinitions) {
  // Single hyperedge over three nodes with t = (1, 0, 1).
  const Hypergraph g = graph_of({{"n1", "n2", "n3"}});
  const NodeCausalTable table = manual_table({1.0, 2.0, 4.0}, {1, 0, 1}, {0, 0, 0});
  const EnvironmentSummary env = environment_summary(g, observed(table));
  ASSERT_EQ(env.width, 3u);
  EXPECT_DOUBLE_EQ(env.row(0)[1], 0.5);  // neighbors n2 (control), n3 (treated)
  EXPECT_DOUBLE_EQ(env.row(1)[1], 1.0);  // both neighbors treated
  EXPECT_DOUBLE_EQ(env.row(2)[1], 0.5);
  EXPECT_DOUBLE_EQ(env.row(0)[0], 3.0);  // mean of x over {n2, n3}
  EXPECT_DOUBLE_EQ(env.row(1)[2], 1.0);  // one hyperedge

  const Hypergraph h(3, {{0, 1}});
  const NodeCausalTable t2 = manual_table({1.0, 2.0, 3.0}, {1, 1, 0}, {0, 0, 0});
  const EnvironmentSummary e2 = environment_summary(h, observed(t2));
  EXPECT_EQ(e2.row(2)[0], 0.0);
  EXPECT_EQ(e2.row(2)[1], 0.0);
  EXPECT_EQ(e2.row(2)[2], 0.0);
}

TEST(Causal, EnvironmentIgnoresOwnRecord) {
  const Hypergraph g = book_graph(120, 8, 11);
  NodeCausalTable table = simulate_outcomes(g, 3, SimulationParams::defaults(3), 2);
  const EnvironmentSummary before = environment_summary(g, observed(table));
  for (NodeId v : {NodeId{0}, NodeId{17}, NodeId{99}}) {
    NodeCausalTable changed = table;
    changed.t[v] = 1 - changed.t[v];
    for (std::size_t k = 0; k < 3; ++k) changed.x[v * 3 + k] += 7.0;
    changed.y_obs[v] = -1e6;
    const EnvironmentSummary after = environment_summary(g, observed(changed));
    const auto a = before.row(v);
    const auto b = after.row(v);
    EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
  }
}

TEST(Causal, ExactRecoveryOnNoiselessLinearData) {
  const Hypergraph g = book_graph(600, 20, 8);
  SimulationParams params = SimulationParams::defaults(3);
  params.noise_scale = 0.0;
  const NodeCausalTable table = simulate_outcomes(g, 3, params, 77);
  const IteEstimate est = estimate_ite(g, observed(table), 0.0);
  EXPECT_FALSE(est.pooled);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const double truth = (*table.tau_true)[v];
    EXPECT_LE(std::abs(est.tau_hat[v] - truth), 1e-8 * std::max(1.0, std::abs(truth)));
  }
}

TEST(Causal, ConstantOutcomeGivesZeroEffect) {
  const Hypergraph g = book_graph(300, 12, 4);
  NodeCausalTable table = simulate_outcomes(g, 2, SimulationParams::defaults(2), 13);
  std::fill(table.y_obs.begin(), table.y_obs.end(), 3.25);
  for (double lambda : {0.0, 1.0}) {
    const IteEstimate est = estimate_ite(g, observed(table), lambda);
    for (double t : est.tau_hat) EXPECT_NEAR(t, 0.0, 1e-9);
  }
}

TEST(Causal, DefaultSimulationCorrelation) {
  const Hypergraph g = book_graph(4400, 120, 1);
  const NodeCausalTable table = simulate_outcomes(g, 10, SimulationParams::defaults(10), 1);
  const IteEstimate est = estimate_ite(g, observed(table), 1.0);
  EXPECT_GT(correlation(est.tau_hat, *table.tau_true), 0.8);
}

TEST(Causal, SmallArmFallsBackToPooledModel) {
  const Hypergraph g = book_graph(200, 10, 6);
  NodeCausalTable table = simulate_outcomes(g, 2, SimulationParams::defaults(2), 3);
  std::fill(table.t.begin(), table.t.end(), 1);
  for (NodeId v = 0; v < 3; ++v) table.t[v] = 0;
  const IteEstimate est = estimate_ite(g, observed(table), 1.0);
  EXPECT_TRUE(est.pooled);
  EXPECT_FALSE(est.warnings.empty());
  for (double t : est.tau_hat) EXPECT_EQ(t, est.tau_hat[0]);
  try {
    estimate_ite(g, observed(table), 1.0, true);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateArm);
  }
  std::fill(table.t.begin(), table.t.end(), 1);
  const IteEstimate none = estimate_ite(g, observed(table), 1.0);
  EXPECT_EQ(none.warnings.size(), 2u);
  for (double t : none.tau_hat) EXPECT_EQ(t, 0.0);
  EXPECT_THROW(estimate_ite(g, observed(table), -1.0), Error);
}

TEST(Causal, NoiseInjection) {
  const Hypergraph g = book_graph(1000, 30, 2);
  const NodeCausalTable table = simulate_outcomes(g, 2, SimulationParams::defaults(2), 8);
  const NodeCausalTable same = inject_noise(table, 0.0, 5);
  EXPECT_EQ(same.tau_hat, table.tau_hat);

  const NodeCausalTable noisy = inject_noise(table, 5.0, 5);
  std::vector<double> diff(1000);
  for (std::size_t i = 0; i < 1000; ++i) diff[i] = noisy.tau_hat[i] - table.tau_hat[i];
  const double mean = std::accumulate(diff.begin(), diff.end(), 0.0) / 1000.0;
  double ss = 0.0;
  for (double d : diff) ss += (d - mean) * (d - mean);
  EXPECT_NEAR(std::sqrt(ss / 999.0), 5.0, 0.4);

  // The unit draws are shared across noise levels.
  const NodeCausalTable two = inject_noise(table, 2.0, 5);
  for (std::size_t i = 0; i < 1000; ++i) EXPECT_NEAR(two.tau_hat[i] - table.tau_hat[i], 0.4 * diff[i], 1e-9);
  EXPECT_THROW(inject_noise(table, -1.0, 5), Error);
}

TEST(Causal, AttributeFileRoundTrip) {
  const Hypergraph g = book_graph(50, 5, 9);
  const NodeCausalTable table = simulate_outcomes(g, 3, SimulationParams::defaults(3), 21);
  std::ostringstream out;
  write_attributes(out, g, table);
  std::istringstream in(out.str());
  const NodeCausalTable back = parse_attributes(in, g);
  EXPECT_EQ(back.dim, 3u);
  EXPECT_EQ(back.x, table.x);
  EXPECT_EQ(back.t, table.t);
  EXPECT_EQ(back.y_obs, table.y_obs);
  ASSERT_TRUE(back.tau_true);
  EXPECT_EQ(*back.tau_true, *table.tau_true);
  EXPECT_EQ(out.str().rfind("# cauim-attributes v1\n", 0), 0u);
}

TEST(Causal, IteFileRoundTripAndErrors) {
  const Hypergraph g = graph_of({{"a", "b"}, {"b", "c"}});
  const std::vector<double> tau{1.5, -0.25, 3.0};
  std::ostringstream out;
  write_ite(out, g, tau);
  EXPECT_EQ(out.str(), "# cauim-ite v1\nnode,tau_hat\na,1.5\nb,-0.25\nc,3\n");
  std::istringstream in(out.str());
  EXPECT_EQ(parse_ite(in, g), tau);

  for (const char* bad : {"node,tau_hat\na,1\nb,2\n", "node,tau_hat\na,1\nb,2\nc,3\nc,4\n",
                          "node,tau_hat\na,1\nb,2\nzz,3\n", "node,tau_hat\na,1\nb,x\nc,3\n"}) {
    std::istringstream s(bad);
    EXPECT_THROW(parse_ite(s, g), Error) << bad;
  }
}
