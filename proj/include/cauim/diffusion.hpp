#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cauim/hypergraph.hpp"

namespace cauim {

enum class DiffusionModel {
  // Generalized independent cascade: each newly active node gets one chance
  // to activate each inactive neighbor.
  GIC,
  // SI with contact process: every active node picks one of its hyperedges
  // per step and infects the susceptible members of that hyperedge.
  SICP,
};

// How an SICP node picks the hyperedge it spreads through.
enum class EdgeChoice { Uniform, SizeProportional };

std::string_view to_string(DiffusionModel model);
DiffusionModel parse_model(std::string_view text);
std::string_view to_string(EdgeChoice choice);
EdgeChoice parse_edge_choice(std::string_view text);

// Optional per-pair activation probabilities p_uv (u attempts v). Pairs not
// listed fall back to the scalar probability of the config.
class PairProbabilities {
 public:
  void set(NodeId from, NodeId to, double p);
  std::optional<double> find(NodeId from, NodeId to) const;
  std::size_t size() const noexcept { return table_.size(); }

 private:
  static std::uint64_t key(NodeId from, NodeId to) noexcept {
    return (static_cast<std::uint64_t>(from) << 32) | to;
  }
  std::unordered_map<std::uint64_t, double> table_;
};

// CSV `u,v,p` with node labels resolved against g. A header row is optional.
PairProbabilities parse_pair_probabilities(std::istream& in, const Hypergraph& g);
PairProbabilities load_pair_probabilities(const std::filesystem::path& path, const Hypergraph& g);

struct DiffusionConfig {
  DiffusionModel model = DiffusionModel::SICP;
  double p = 0.01;
  std::uint32_t horizon = 5;
  std::uint64_t seed = 0;
  EdgeChoice edge_choice = EdgeChoice::Uniform;
  std::shared_ptr<const PairProbabilities> pair_probabilities;

  // Throws InvalidArgument unless 0 <= p <= 1.
  void validate() const;

  double probability(NodeId from, NodeId to) const {
    if (pair_probabilities) {
      if (auto q = pair_probabilities->find(from, to)) return *q;
    }
    return p;
  }
};

// Activation history S_0 ⊆ S_1 ⊆ ... ⊆ S_m stored as one activation-ordered
// node list plus cumulative layer sizes, so nesting holds by construction.
class SimulationTrace {
 public:
  // Number of executed steps m; layers 0..m exist.
  std::size_t steps() const noexcept { return layer_end_.empty() ? 0 : layer_end_.size() - 1; }
  // S_t in activation order.
  std::span<const NodeId> layer(std::size_t t) const;
  // S_t \ S_{t-1}; for t = 0 the seed set.
  std::span<const NodeId> newly_active(std::size_t t) const;
  std::span<const NodeId> final_active() const { return order_; }

  bool operator==(const SimulationTrace&) const = default;

 private:
  friend class Propagator;
  std::vector<NodeId> order_;
  std::vector<std::size_t> layer_end_;
};

inline constexpr std::uint32_t kNever = std::numeric_limits<std::uint32_t>::max();

// Worker-local propagation engine. Each Monte-Carlo round is a "world" whose
// randomness is fully addressed by (config seed, round, step, node), so two
// runs in the same world share every coin flip. Under that coupling the final
// active set is a reachability set, which is what makes incremental
// marginal-gain evaluation exact.
class Propagator {
 public:
  Propagator(const Hypergraph& g, const DiffusionConfig& cfg);

  // Propagates from `seeds` in world `round`. `base`, when non-empty, gives
  // for every node the time it is already active through some other seed set
  // (kNever if never); the run then only explores activations that happen
  // strictly earlier than the base ones. With an empty base this is a plain
  // simulation.
  void run(std::span<const NodeId> seeds, std::uint64_t round, std::span<const std::uint32_t> base = {});

  // Nodes reached by the last run, in activation order, with their times.
  std::span<const NodeId> reached() const noexcept { return order_; }
  std::uint32_t time_of(std::size_t index) const noexcept { return times_[index]; }

  // The last run as a trace; meaningful for runs with an empty base.
  SimulationTrace trace() const;

 private:
  bool reached_already(NodeId v) const noexcept { return stamp_[v] == epoch_; }
  void mark(NodeId v, std::uint32_t t);
  bool saturated(NodeId v) const;
  template <class Hit>
  void transmit_sicp(NodeId x, std::uint32_t t, std::uint64_t world, Hit&& hit) const;
  template <class Hit>
  void transmit_gic(NodeId x, std::uint64_t world, Hit&& hit) const;

  const Hypergraph* g_;
  DiffusionConfig cfg_;
  double inv_log_fail_ = 0.0;
  std::vector<std::uint32_t> stamp_;
  std::vector<std::uint32_t> edge_stamp_;
  std::vector<std::uint32_t> edge_reached_;
  std::uint32_t epoch_ = 0;
  std::vector<NodeId> order_;
  std::vector<std::uint32_t> times_;
  std::vector<std::size_t> layer_end_;
  std::vector<NodeId> acting_;
  std::vector<NodeId> next_;
};

SimulationTrace run_gic(const Hypergraph& g, std::span<const NodeId> seeds, const DiffusionConfig& cfg,
                        std::uint64_t round = 0);
SimulationTrace run_sicp(const Hypergraph& g, std::span<const NodeId> seeds, const DiffusionConfig& cfg,
                         std::uint64_t round = 0);
SimulationTrace run(const Hypergraph& g, std::span<const NodeId> seeds, const DiffusionConfig& cfg,
                    std::uint64_t round = 0);

// Debug dump: one line per step listing the labels activated in that step.
void write_trace(std::ostream& out, const Hypergraph& g, const SimulationTrace& trace);

}  // namespace cauim
