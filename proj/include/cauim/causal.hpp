#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cauim/hypergraph.hpp"

namespace cauim {

// Per-node covariates, treatment, observed outcome and effects.
struct NodeCausalTable {
  std::size_t dim = 0;
  std::vector<double> x;             // node_count x dim, row-major
  std::vector<std::uint8_t> t;       // 0 or 1
  std::vector<double> y_obs;
  std::vector<double> tau_hat;       // node weights consumed by selection
  std::optional<std::vector<double>> tau_true;

  std::size_t size() const noexcept { return t.size(); }
  std::span<const double> covariates(NodeId v) const { return {x.data() + v * dim, dim}; }
};

// What an estimator may look at: no ground truth, no unobserved arm.
struct ObservedData {
  std::size_t dim = 0;
  std::span<const double> x;
  std::span<const std::uint8_t> t;
  std::span<const double> y_obs;

  std::size_t size() const noexcept { return t.size(); }
  std::span<const double> covariates(NodeId v) const { return x.subspan(v * dim, dim); }
};

ObservedData observed(const NodeCausalTable& table);

// y(a) = b0 + baseline.x + a * (effect_intercept + effect.x + spillover.mean_{N_i} x) + noise,
// with the same noise draw in both arms, and P(t = 1) = logistic(propensity.x).
struct SimulationParams {
  std::vector<double> propensity;
  std::vector<double> baseline;
  std::vector<double> effect;
  std::vector<double> spillover;
  double baseline_intercept = 0.0;
  double effect_intercept = 0.0;
  double noise_scale = 1.0;

  static SimulationParams defaults(std::size_t dim);
  // Throws InvalidArgument if a coefficient vector does not have length dim
  // or noise_scale is negative.
  void validate(std::size_t dim) const;
};

NodeCausalTable simulate_outcomes(const Hypergraph& g, std::size_t dim, const SimulationParams& params,
                                  std::uint64_t seed);

// o_i = (mean x over N_i, treated fraction over N_i, |H_i|), stored row-major
// with width dim + 2. Nodes without neighbors get zero means and fraction 0.
struct EnvironmentSummary {
  std::size_t width = 0;
  std::vector<double> values;

  std::span<const double> row(NodeId v) const { return {values.data() + v * width, width}; }
};

EnvironmentSummary environment_summary(const Hypergraph& g, const ObservedData& data);

struct IteEstimate {
  std::vector<double> tau_hat;
  bool pooled = false;  // fell back to the single model with t as a feature
  std::vector<std::string> warnings;
};

// Two ridge regressions (one per observed arm) on features [1, x, o]; the
// intercept is not penalized. tau_hat_i = f1(x_i, o_i) - f0(x_i, o_i). If an
// arm has fewer than 2*dim + 3 samples the estimator warns and fits one pooled
// model on [1, x, o, t] instead; with `strict` it throws DegenerateArm.
IteEstimate estimate_ite(const Hypergraph& g, const ObservedData& data, double lambda, bool strict = false);

// tau_hat_i += N(0, sigma^2), independently per node. The draw for node i is
// sigma * z_i with z_i fixed by (seed, i), so sweeps over sigma share z.
NodeCausalTable inject_noise(const NodeCausalTable& table, double sigma, std::uint64_t seed);
std::vector<double> add_noise(std::span<const double> values, double sigma, std::uint64_t seed);

// Node-attribute CSV: node,t,y,x0..x{d-1}[,tau_true].
void write_attributes(std::ostream& out, const Hypergraph& g, const NodeCausalTable& table);
NodeCausalTable parse_attributes(std::istream& in, const Hypergraph& g);
void save_attributes(const std::filesystem::path& path, const Hypergraph& g, const NodeCausalTable& table);
NodeCausalTable load_attributes(const std::filesystem::path& path, const Hypergraph& g);

// ITE CSV: node,tau_hat. Every node must appear exactly once.
void write_ite(std::ostream& out, const Hypergraph& g, std::span<const double> tau_hat);
std::vector<double> parse_ite(std::istream& in, const Hypergraph& g);
void save_ite(const std::filesystem::path& path, const Hypergraph& g, std::span<const double> tau_hat);
std::vector<double> load_ite(const std::filesystem::path& path, const Hypergraph& g);

}  // namespace cauim
