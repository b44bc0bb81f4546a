#pragma once

// Exact spread computation by enumerating every stochastic outcome of the
// diffusion process. Only usable on tiny instances (at most 64 nodes and a
// bounded number of enumerated outcomes); these routines are the oracles the
// Monte-Carlo estimator and the bound checks are validated against.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "cauim/diffusion.hpp"
#include "cauim/hypergraph.hpp"

namespace cauim {

inline constexpr std::size_t kDefaultEnumerationBudget = std::size_t{1} << 25;

// Memoized outcome enumeration. The memo is keyed by process state, so it is
// shared by all seed sets queried through the same engine. The budget bounds
// the number of outcomes newly enumerated by a single query; exceeding it
// throws BudgetExceeded.
class ExactEngine {
 public:
  ExactEngine(const Hypergraph& g, DiffusionConfig cfg, std::size_t budget = kDefaultEnumerationBudget);
  ~ExactEngine();
  ExactEngine(ExactEngine&&) noexcept;
  ExactEngine& operator=(ExactEngine&&) noexcept;

  // P(v active at the horizon) for every node; seeds have probability 1.
  std::vector<double> activation_probabilities(std::span<const NodeId> seeds);

  // E[sum of weights over the final active set], by a scalar recursion that
  // never materializes per-node probabilities.
  double expected_weight(std::span<const NodeId> seeds, std::span<const double> weights);

  const Hypergraph& graph() const noexcept;
  const DiffusionConfig& config() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Exact expected total weight of the nodes active at the horizon.
double exact_spread(const Hypergraph& g, std::span<const double> weights, std::span<const NodeId> seeds,
                    const DiffusionConfig& cfg, std::size_t budget = kDefaultEnumerationBudget);

// p_r(source set, v): probability that v is active at the horizon when the
// source set is seeded. Entries for members of the source set are reported as
// 0, because seeds are accounted for separately.
class ReachabilityTable {
 public:
  void insert(std::vector<NodeId> sources, std::vector<double> probabilities);
  bool contains(std::span<const NodeId> sources) const;
  double probability(std::span<const NodeId> sources, NodeId target) const;
  const std::vector<double>& row(std::span<const NodeId> sources) const;
  std::size_t size() const noexcept { return rows_.size(); }

 private:
  static std::vector<NodeId> canonical(std::span<const NodeId> sources);
  std::map<std::vector<NodeId>, std::vector<double>> rows_;
};

ReachabilityTable reachability_table(const Hypergraph& g, const DiffusionConfig& cfg,
                                     std::span<const std::vector<NodeId>> sources,
                                     std::size_t budget = kDefaultEnumerationBudget);

// sum_{v not in S} w_v p_r(S, v) + sum_{u in S} w_u. Throws OutOfRange when the
// table has no row for S.
double closed_form_spread(std::span<const double> weights, const ReachabilityTable& table,
                          std::span<const NodeId> seeds);

struct Epsilons {
  double epsilon1 = 0.0;
  double epsilon2 = 0.0;
};

// epsilon1: largest change of p_r(., v') when a source set of size <= cap
// grows by one node (v' outside the grown set). epsilon2: largest
// sum_x |w_x| P(x active | seeds {v}) over single sources v; the sum includes
// v itself, whose own weight is part of every marginal gain of v. cap is
// clamped to node_count - 1; with a smaller cap epsilon1 is a lower bound.
Epsilons compute_epsilons(const Hypergraph& g, std::span<const double> weights, const DiffusionConfig& cfg,
                          std::size_t cap = 3, std::size_t budget = kDefaultEnumerationBudget);
Epsilons compute_epsilons(ExactEngine& engine, std::span<const double> weights, std::size_t cap = 3);

}  // namespace cauim
