#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cauim/diffusion.hpp"
#include "cauim/exact.hpp"
#include "cauim/hypergraph.hpp"
#include "cauim/spread.hpp"

namespace cauim {

enum class Objective { CausalITE, UnitCount };

std::string_view to_string(Objective objective);
Objective parse_objective(std::string_view text);

// Node weights for an objective: tau_hat itself, or all ones.
std::vector<double> objective_weights(Objective objective, std::span<const double> tau_hat);

// Incremental set function driven by the selection algorithms.
class SpreadOracle {
 public:
  virtual ~SpreadOracle() = default;
  virtual std::size_t node_count() const = 0;
  // Value of the committed set.
  virtual double value() const = 0;
  // value(committed ∪ {v}) - value(committed) for each candidate.
  virtual std::vector<double> gains(std::span<const NodeId> candidates) = 0;
  virtual void commit(NodeId v) = 0;
  virtual void reset() = 0;
};

// Sample-average spread over a fixed set of worlds (common random numbers for
// every candidate and every step).
class McOracle final : public SpreadOracle {
 public:
  McOracle(const Hypergraph& g, std::vector<double> weights, DiffusionConfig cfg, std::size_t rounds,
           std::size_t workers = 0);
  std::size_t node_count() const override { return n_; }
  double value() const override { return sample_.value(); }
  std::vector<double> gains(std::span<const NodeId> candidates) override { return sample_.gains(candidates); }
  void commit(NodeId v) override { sample_.add(v); }
  void reset() override { sample_.reset(); }

 private:
  std::size_t n_;
  WorldSample sample_;
};

// Exact expected spread by outcome enumeration (tiny instances).
class ExactOracle final : public SpreadOracle {
 public:
  ExactOracle(const Hypergraph& g, std::vector<double> weights, DiffusionConfig cfg,
              std::size_t budget = kDefaultEnumerationBudget);
  // Shares an existing engine (and its memo); the engine must outlive the oracle.
  ExactOracle(ExactEngine& engine, std::vector<double> weights);
  std::size_t node_count() const override;
  double value() const override { return value_; }
  std::vector<double> gains(std::span<const NodeId> candidates) override;
  void commit(NodeId v) override;
  void reset() override;

 private:
  std::optional<ExactEngine> owned_;
  ExactEngine* engine_;
  std::vector<double> weights_;
  std::vector<NodeId> seeds_;
  double value_ = 0.0;
};

// Arbitrary set function; f(empty set) need not be zero.
class SetFunctionOracle final : public SpreadOracle {
 public:
  using Function = std::function<double(std::span<const NodeId>)>;
  SetFunctionOracle(std::size_t node_count, Function f);
  std::size_t node_count() const override { return n_; }
  double value() const override { return value_; }
  std::vector<double> gains(std::span<const NodeId> candidates) override;
  void commit(NodeId v) override;
  void reset() override;

 private:
  std::size_t n_;
  Function f_;
  std::vector<NodeId> seeds_;
  double value_ = 0.0;
};

struct SelectionTrace {
  std::vector<NodeId> seeds;
  std::vector<double> gains;        // marginal gain of each accepted seed
  std::vector<std::size_t> evals;   // marginal-gain evaluations spent per step
  std::vector<double> sigma_curve;  // oracle value after each seed

  std::size_t total_evals() const;
};

struct GreedyOptions {
  // Stop early instead of accepting a seed whose best gain is negative.
  bool stop_on_negative = false;
  // Candidate pool; empty means every node.
  std::vector<NodeId> candidates;
};

// Full greedy: every remaining candidate is evaluated at every step; ties go
// to the smallest NodeId.
SelectionTrace greedy_select(SpreadOracle& oracle, std::size_t k, const GreedyOptions& options = {});

// Lazy-forward greedy. Cached gains are upper bounds only when the oracle is
// submodular; with mixed-sign weights this is a heuristic.
SelectionTrace celf_select(SpreadOracle& oracle, std::size_t k, const GreedyOptions& options = {});

// Uniform sample without replacement from nodes in at least one hyperedge.
// evals are 0 and gains/sigma_curve are left empty.
SelectionTrace random_select(const Hypergraph& g, std::size_t k, std::uint64_t seed);

struct OptimalSet {
  std::vector<NodeId> seeds;
  double sigma = 0.0;
};

// Exhaustive maximum of the exact spread over all k-subsets. Ties go to the
// lexicographically smallest set. `max_subsets` bounds C(n, k).
OptimalSet brute_force_optimal(ExactEngine& engine, std::span<const double> weights, std::size_t k,
                               std::size_t max_subsets = std::size_t{1} << 20);

// MC spread of every prefix of `seeds`: entry i is the estimate for the first
// i + 1 seeds.
std::vector<SpreadEstimate> evaluate_prefixes(const Hypergraph& g, std::span<const double> weights,
                                              std::span<const NodeId> seeds, const DiffusionConfig& cfg,
                                              std::size_t rounds, std::size_t workers = 0);

// CSV `rep,step,node,gain,sigma,evals` with steps counted from 1.
void write_trace_header(std::ostream& out);
void write_trace_rows(std::ostream& out, const Hypergraph& g, const SelectionTrace& trace, std::size_t rep);

}  // namespace cauim
