#include "cauim/selection.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <queue>
#include <string>

#include "cauim/error.hpp"
#include "cauim/io.hpp"
#include "cauim/rng.hpp"

namespace cauim {

std::string_view to_string(Objective objective) {
  return objective == Objective::CausalITE ? "causal" : "count";
}

Objective parse_objective(std::string_view text) {
  if (text == "causal") return Objective::CausalITE;
  if (text == "count") return Objective::UnitCount;
  throw Error(ErrorCode::InvalidArgument, "unknown objective '" + std::string(text) + "'");
}

std::vector<double> objective_weights(Objective objective, std::span<const double> tau_hat) {
  if (objective == Objective::UnitCount) return std::vector<double>(tau_hat.size(), 1.0);
  return {tau_hat.begin(), tau_hat.end()};
}

McOracle::McOracle(const Hypergraph& g, std::vector<double> weights, DiffusionConfig cfg, std::size_t rounds,
                   std::size_t workers)
    : n_(g.node_count()), sample_(g, std::move(weights), std::move(cfg), rounds, workers) {}

ExactOracle::ExactOracle(const Hypergraph& g, std::vector<double> weights, DiffusionConfig cfg,
                         std::size_t budget)
    : owned_(std::in_place, g, std::move(cfg), budget), engine_(&*owned_), weights_(std::move(weights)) {
  reset();
}

ExactOracle::ExactOracle(ExactEngine& engine, std::vector<double> weights)
    : engine_(&engine), weights_(std::move(weights)) {
  reset();
}

std::size_t ExactOracle::node_count() const { return engine_->graph().node_count(); }

std::vector<double> ExactOracle::gains(std::span<const NodeId> candidates) {
  std::vector<double> out;
  out.reserve(candidates.size());
  std::vector<NodeId> with = seeds_;
  with.push_back(0);
  for (NodeId v : candidates) {
    with.back() = v;
    out.push_back(engine_->expected_weight(with, weights_) - value_);
  }
  return out;
}

void ExactOracle::commit(NodeId v) {
  seeds_.push_back(v);
  value_ = engine_->expected_weight(seeds_, weights_);
}

void ExactOracle::reset() {
  seeds_.clear();
  value_ = 0.0;
}

SetFunctionOracle::SetFunctionOracle(std::size_t node_count, Function f) : n_(node_count), f_(std::move(f)) {
  reset();
}

std::vector<double> SetFunctionOracle::gains(std::span<const NodeId> candidates) {
  std::vector<double> out;
  out.reserve(candidates.size());
  std::vector<NodeId> with = seeds_;
  with.push_back(0);
  for (NodeId v : candidates) {
    with.back() = v;
    out.push_back(f_(with) - value_);
  }
  return out;
}

void SetFunctionOracle::commit(NodeId v) {
  seeds_.push_back(v);
  value_ = f_(seeds_);
}

void SetFunctionOracle::reset() {
  seeds_.clear();
  value_ = f_(seeds_);
}

std::size_t SelectionTrace::total_evals() const { return std::accumulate(evals.begin(), evals.end(), std::size_t{0}); }

namespace {

std::vector<NodeId> candidate_pool(const SpreadOracle& oracle, const GreedyOptions& options, std::size_t k) {
  std::vector<NodeId> pool = options.candidates;
  if (pool.empty()) {
    pool.resize(oracle.node_count());
    std::iota(pool.begin(), pool.end(), NodeId{0});
  } else {
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    if (pool.back() >= oracle.node_count()) throw Error(ErrorCode::OutOfRange, "candidate node out of range");
  }
  if (k > pool.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "K = " + std::to_string(k) + " exceeds the candidate pool of " + std::to_string(pool.size()));
  }
  return pool;
}

void accept(SpreadOracle& oracle, SelectionTrace& trace, NodeId v, double gain, std::size_t evals) {
  oracle.commit(v);
  trace.seeds.push_back(v);
  trace.gains.push_back(gain);
  trace.evals.push_back(evals);
  trace.sigma_curve.push_back(oracle.value());
}

}  // namespace

SelectionTrace greedy_select(SpreadOracle& oracle, std::size_t k, const GreedyOptions& options) {
  std::vector<NodeId> pool = candidate_pool(oracle, options, k);
  oracle.reset();
  SelectionTrace trace;
  for (std::size_t step = 0; step < k; ++step) {
    const auto gains = oracle.gains(pool);
    // argmax with ties to the smallest id; pool is sorted ascending.
    std::size_t best = 0;
    for (std::size_t i = 1; i < pool.size(); ++i) {
      if (gains[i] > gains[best]) best = i;
    }
    if (options.stop_on_negative && gains[best] < 0.0) break;
    accept(oracle, trace, pool[best], gains[best], pool.size());
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return trace;
}

SelectionTrace celf_select(SpreadOracle& oracle, std::size_t k, const GreedyOptions& options) {
  const std::vector<NodeId> pool = candidate_pool(oracle, options, k);
  oracle.reset();
  SelectionTrace trace;
  if (k == 0) return trace;

  struct Entry {
    double gain;
    NodeId node;
    std::size_t updated;  // number of seeds committed when the gain was computed
  };
  // Max-heap on gain, then min on node id.
  auto lower = [](const Entry& a, const Entry& b) { return a.gain != b.gain ? a.gain < b.gain : a.node > b.node; };
  std::priority_queue<Entry, std::vector<Entry>, decltype(lower)> queue(lower);

  const auto initial = oracle.gains(pool);
  for (std::size_t i = 0; i < pool.size(); ++i) queue.push({initial[i], pool[i], 0});
  std::size_t evals = pool.size();

  while (trace.seeds.size() < k && !queue.empty()) {
    Entry top = queue.top();
    queue.pop();
    if (top.updated == trace.seeds.size()) {
      if (options.stop_on_negative && top.gain < 0.0) break;
      accept(oracle, trace, top.node, top.gain, evals);
      evals = 0;
      continue;
    }
    const NodeId node[1] = {top.node};
    top.gain = oracle.gains(node)[0];
    top.updated = trace.seeds.size();
    ++evals;
    queue.push(top);
  }
  return trace;
}

SelectionTrace random_select(const Hypergraph& g, std::size_t k, std::uint64_t seed) {
  std::vector<NodeId> pool;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (g.degree(v) >= 1) pool.push_back(v);
  }
  if (k > pool.size()) {
    throw Error(ErrorCode::InvalidArgument, "K = " + std::to_string(k) + " exceeds the " +
                                                std::to_string(pool.size()) + " nodes that belong to a hyperedge");
  }
  rng::Stream s(rng::derive(seed, 0x72616e646f6d5f73ULL));
  SelectionTrace trace;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(s.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
    trace.seeds.push_back(pool[i]);
    trace.evals.push_back(0);
  }
  return trace;
}

OptimalSet brute_force_optimal(ExactEngine& engine, std::span<const double> weights, std::size_t k,
                               std::size_t max_subsets) {
  const std::size_t n = engine.graph().node_count();
  if (k > n) throw Error(ErrorCode::InvalidArgument, "K exceeds the node count");
  // C(n, k) with early exit once it passes the limit.
  std::size_t count = 1;
  for (std::size_t i = 0; i < k; ++i) {
    count = count * (n - i) / (i + 1);
    if (count > max_subsets) throw Error(ErrorCode::BudgetExceeded, "too many seed subsets to enumerate");
  }

  OptimalSet best;
  bool found = false;
  std::vector<NodeId> pick(k);
  std::iota(pick.begin(), pick.end(), NodeId{0});
  while (true) {
    const double sigma = engine.expected_weight(pick, weights);
    if (!found || sigma > best.sigma) {
      best.seeds = pick;
      best.sigma = sigma;
      found = true;
    }
    // Next combination in lexicographic order.
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return best;
}

std::vector<SpreadEstimate> evaluate_prefixes(const Hypergraph& g, std::span<const double> weights,
                                              std::span<const NodeId> seeds, const DiffusionConfig& cfg,
                                              std::size_t rounds, std::size_t workers) {
  WorldSample sample(g, {weights.begin(), weights.end()}, cfg, rounds, workers);
  std::vector<SpreadEstimate> out;
  out.reserve(seeds.size());
  for (NodeId v : seeds) {
    sample.add(v);
    out.push_back(sample.estimate());
  }
  return out;
}

void write_trace_header(std::ostream& out) { out << "rep,step,node,gain,sigma,evals\n"; }

void write_trace_rows(std::ostream& out, const Hypergraph& g, const SelectionTrace& trace, std::size_t rep) {
  for (std::size_t i = 0; i < trace.seeds.size(); ++i) {
    out << rep << ',' << i + 1 << ',' << g.node_label(trace.seeds[i]) << ',';
    out << (i < trace.gains.size() ? io::format_double(trace.gains[i]) : "") << ',';
    out << (i < trace.sigma_curve.size() ? io::format_double(trace.sigma_curve[i]) : "") << ',';
    out << trace.evals[i] << '\n';
  }
}

}  // namespace cauim
