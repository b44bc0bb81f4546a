#pragma once

// Slow reference implementations used only by tests. They share no code with
// the library beyond the Hypergraph and DiffusionConfig types.

#include <cstddef>
#include <span>
#include <vector>

#include "cauim/diffusion.hpp"
#include "cauim/hypergraph.hpp"

namespace oracle {

using cauim::DiffusionConfig;
using cauim::Hypergraph;
using cauim::NodeId;

// GIC: enumerate every live/blocked pattern of the directed neighbor pairs;
// a node is active iff it is within `horizon` live hops of a seed.
std::vector<double> gic_live_edge(const Hypergraph& g, std::span<const NodeId> seeds, const DiffusionConfig& cfg);

// SICP: plain outcome tree, step by step; every active node picks a hyperedge
// and every susceptible member is an independent coin. No memoization.
std::vector<double> sicp_tree(const Hypergraph& g, std::span<const NodeId> seeds, const DiffusionConfig& cfg);

// Dispatch on cfg.model.
std::vector<double> activation(const Hypergraph& g, std::span<const NodeId> seeds, const DiffusionConfig& cfg);

double spread(const Hypergraph& g, std::span<const double> weights, std::span<const NodeId> seeds,
              const DiffusionConfig& cfg);

struct Epsilons {
  double epsilon1 = 0.0;
  double epsilon2 = 0.0;
};

// Condition-1 constants straight from the definitions, using `activation`.
Epsilons epsilons(const Hypergraph& g, std::span<const double> weights, const DiffusionConfig& cfg, std::size_t cap);

// Best K-subset by exhaustive search over `spread`; ties keep the first in
// lexicographic order.
std::vector<NodeId> best_subset(const Hypergraph& g, std::span<const double> weights, const DiffusionConfig& cfg,
                                std::size_t k, double* value = nullptr);

}  // namespace oracle
