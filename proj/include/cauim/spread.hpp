#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cauim/diffusion.hpp"
#include "cauim/hypergraph.hpp"

namespace cauim {

struct SpreadEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(rounds)
  std::size_t rounds = 0;
};

// Monte-Carlo spread: average over `rounds` worlds of the summed weights of
// all nodes active at the horizon, seeds included. Round r uses world r of
// cfg.seed, so the estimate does not depend on `workers`.
SpreadEstimate mc_estimate(const Hypergraph& g, std::span<const double> weights, std::span<const NodeId> seeds,
                           const DiffusionConfig& cfg, std::size_t rounds, std::size_t workers = 0);

// A fixed sample of diffusion worlds together with the activation times
// produced by a growing seed set. Marginal gains are computed by propagating
// the candidate against the cached times, which matches re-simulating the
// enlarged seed set in the same worlds but only pays for the new part.
class WorldSample {
 public:
  WorldSample(const Hypergraph& g, std::vector<double> weights, DiffusionConfig cfg, std::size_t rounds,
              std::size_t workers = 0);

  std::size_t rounds() const noexcept { return rounds_; }
  const std::vector<NodeId>& seeds() const noexcept { return seeds_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  // Sample-average spread of the current seed set.
  double value() const;
  SpreadEstimate estimate() const;

  // value(seeds ∪ {v}) - value(seeds) for each candidate.
  std::vector<double> gains(std::span<const NodeId> candidates) const;
  double gain(NodeId candidate) const;

  void add(NodeId v);
  void reset();

 private:
  double gain_with(Propagator& engine, NodeId candidate) const;

  const Hypergraph* g_;
  std::vector<double> weights_;
  DiffusionConfig cfg_;
  std::size_t rounds_;
  std::size_t workers_;
  std::vector<NodeId> seeds_;
  std::vector<std::uint32_t> times_;  // rounds_ x node_count
  std::vector<double> totals_;        // per-round weight of the active set
  mutable std::vector<Propagator> engines_;
};

}  // namespace cauim
