#include "cauim/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_map>
#include <utility>

#include "cauim/error.hpp"
#include "cauim/rng.hpp"

namespace cauim {

namespace {

using Mask = std::uint64_t;

struct State {
  Mask active = 0;
  Mask frontier = 0;  // GIC only: nodes activated in the previous step
  std::uint32_t t = 0;
  bool operator==(const State&) const = default;
};

struct StateHash {
  std::size_t operator()(const State& s) const noexcept {
    return static_cast<std::size_t>(rng::derive(rng::mix(s.active), {s.frontier, s.t}));
  }
};

struct Outcome {
  State next;
  double prob;
};

Mask bit(NodeId v) { return Mask{1} << v; }

template <class Fn>
void for_each_node(Mask m, Fn&& fn) {
  while (m != 0) {
    fn(static_cast<NodeId>(std::countr_zero(m)));
    m &= m - 1;
  }
}

}  // namespace

struct ExactEngine::Impl {
  const Hypergraph* g;
  DiffusionConfig cfg;
  std::size_t budget;
  std::size_t spent = 0;
  std::vector<Mask> neighbor_mask;
  std::vector<Mask> member_mask;
  std::unordered_map<State, std::vector<double>, StateHash> vector_memo;
  std::unordered_map<State, double, StateHash> scalar_memo;
  std::vector<double> scalar_weights;

  Impl(const Hypergraph& graph, DiffusionConfig c, std::size_t b) : g(&graph), cfg(std::move(c)), budget(b) {
    cfg.validate();
    const std::size_t n = g->node_count();
    if (n > 64) throw Error(ErrorCode::BudgetExceeded, "exact enumeration supports at most 64 nodes");
    neighbor_mask.assign(n, 0);
    for (NodeId v = 0; v < n; ++v) {
      for (NodeId u : g->neighbors(v)) neighbor_mask[v] |= bit(u);
    }
    member_mask.assign(g->edge_count(), 0);
    for (EdgeId e = 0; e < g->edge_count(); ++e) {
      for (NodeId u : g->members(e)) member_mask[e] |= bit(u);
    }
  }

  void charge(std::size_t outcomes) {
    if (outcomes > budget || spent > budget - outcomes) {
      throw Error(ErrorCode::BudgetExceeded, "exact enumeration budget exceeded");
    }
    spent += outcomes;
  }

  Mask seed_mask(std::span<const NodeId> seeds) const {
    Mask m = 0;
    for (NodeId v : seeds) {
      if (v >= g->node_count()) throw Error(ErrorCode::OutOfRange, "seed node out of range");
      m |= bit(v);
    }
    return m;
  }

  State initial(Mask seeds) const {
    return cfg.model == DiffusionModel::GIC ? State{seeds, seeds, 0} : State{seeds, 0, 0};
  }

  // Splits per-node activation probabilities into certain and uncertain nodes
  // and emits every joint outcome of the uncertain ones.
  template <class Emit>
  void expand_coins(std::span<const std::pair<NodeId, double>> targets, double base_prob, Emit&& emit) {
    Mask sure = 0;
    std::vector<std::pair<NodeId, double>> coins;
    for (const auto& [v, q] : targets) {
      if (q >= 1.0) {
        sure |= bit(v);
      } else if (q > 0.0) {
        coins.emplace_back(v, q);
      }
    }
    if (coins.size() >= 63) throw Error(ErrorCode::BudgetExceeded, "exact enumeration budget exceeded");
    charge(std::size_t{1} << coins.size());
    auto rec = [&](auto&& self, std::size_t i, Mask chosen, double prob) -> void {
      if (prob == 0.0) return;
      if (i == coins.size()) {
        emit(sure | chosen, prob);
        return;
      }
      self(self, i + 1, chosen | bit(coins[i].first), prob * coins[i].second);
      self(self, i + 1, chosen, prob * (1.0 - coins[i].second));
    };
    rec(rec, 0, 0, base_prob);
  }

  // Empty result: the state is absorbing.
  std::vector<Outcome> transitions(const State& s) {
    std::vector<Outcome> out;
    if (s.t >= cfg.horizon) return out;
    const std::uint32_t t1 = s.t + 1;

    if (cfg.model == DiffusionModel::GIC) {
      if (s.frontier == 0) return out;
      Mask cand = 0;
      for_each_node(s.frontier, [&](NodeId u) { cand |= neighbor_mask[u]; });
      cand &= ~s.active;
      std::vector<std::pair<NodeId, double>> targets;
      for_each_node(cand, [&](NodeId v) {
        double fail = 1.0;
        for_each_node(s.frontier & neighbor_mask[v], [&](NodeId u) { fail *= 1.0 - cfg.probability(u, v); });
        targets.emplace_back(v, 1.0 - fail);
      });
      expand_coins(targets, 1.0, [&](Mask o, double prob) { out.push_back({State{s.active | o, o, t1}, prob}); });
      return out;
    }

    // SICP: every active node with a susceptible hyperedge member picks a
    // hyperedge; choices that expose the same susceptible set are merged.
    struct Actor {
      NodeId x;
      std::vector<std::pair<Mask, double>> options;
    };
    std::vector<Actor> actors;
    std::size_t profiles = 1;
    for_each_node(s.active, [&](NodeId x) {
      const auto star = g->star(x);
      if (star.empty()) return;
      double total = 0.0;
      for (EdgeId e : star) {
        total += cfg.edge_choice == EdgeChoice::Uniform ? 1.0 : static_cast<double>(g->edge_size(e));
      }
      Actor a{x, {}};
      for (EdgeId e : star) {
        const double w =
            (cfg.edge_choice == EdgeChoice::Uniform ? 1.0 : static_cast<double>(g->edge_size(e))) / total;
        const Mask open = member_mask[e] & ~s.active;
        auto it = std::find_if(a.options.begin(), a.options.end(), [&](const auto& o) { return o.first == open; });
        if (it == a.options.end()) {
          a.options.emplace_back(open, w);
        } else {
          it->second += w;
        }
      }
      if (a.options.size() == 1 && a.options[0].first == 0) return;
      profiles *= a.options.size();
      if (profiles > budget) throw Error(ErrorCode::BudgetExceeded, "exact enumeration budget exceeded");
      actors.push_back(std::move(a));
    });
    if (actors.empty()) return out;

    std::unordered_map<Mask, double> dist;
    std::vector<Mask> chosen(actors.size(), 0);
    auto rec = [&](auto&& self, std::size_t i, double prob) -> void {
      if (i == actors.size()) {
        Mask exposed = 0;
        for (Mask m : chosen) exposed |= m;
        std::vector<std::pair<NodeId, double>> targets;
        for_each_node(exposed, [&](NodeId v) {
          double fail = 1.0;
          for (std::size_t k = 0; k < actors.size(); ++k) {
            if (chosen[k] & bit(v)) fail *= 1.0 - cfg.probability(actors[k].x, v);
          }
          targets.emplace_back(v, 1.0 - fail);
        });
        expand_coins(targets, prob, [&](Mask o, double q) { dist[s.active | o] += q; });
        return;
      }
      for (const auto& [open, w] : actors[i].options) {
        chosen[i] = open;
        self(self, i + 1, prob * w);
      }
    };
    rec(rec, 0, 1.0);

    // Nothing can change any more: the state is a fixpoint for every later step.
    if (dist.size() == 1 && dist.begin()->first == s.active) return out;
    out.reserve(dist.size());
    for (const auto& [a, prob] : dist) out.push_back({State{a, 0, t1}, prob});
    std::sort(out.begin(), out.end(), [](const Outcome& l, const Outcome& r) { return l.next.active < r.next.active; });
    return out;
  }

  std::vector<double> probabilities(const State& s) {
    if (auto it = vector_memo.find(s); it != vector_memo.end()) return it->second;
    std::vector<double> value(g->node_count(), 0.0);
    const auto next = transitions(s);
    if (next.empty()) {
      for_each_node(s.active, [&](NodeId v) { value[v] = 1.0; });
    } else {
      for (const auto& o : next) {
        const auto sub = probabilities(o.next);
        for (std::size_t v = 0; v < value.size(); ++v) value[v] += o.prob * sub[v];
      }
    }
    vector_memo.emplace(s, value);
    return value;
  }

  double weight(const State& s) {
    if (auto it = scalar_memo.find(s); it != scalar_memo.end()) return it->second;
    double value = 0.0;
    const auto next = transitions(s);
    if (next.empty()) {
      for_each_node(s.active, [&](NodeId v) { value += scalar_weights[v]; });
    } else {
      for (const auto& o : next) value += o.prob * weight(o.next);
    }
    scalar_memo.emplace(s, value);
    return value;
  }
};

ExactEngine::ExactEngine(const Hypergraph& g, DiffusionConfig cfg, std::size_t budget)
    : impl_(std::make_unique<Impl>(g, std::move(cfg), budget)) {}
ExactEngine::~ExactEngine() = default;
ExactEngine::ExactEngine(ExactEngine&&) noexcept = default;
ExactEngine& ExactEngine::operator=(ExactEngine&&) noexcept = default;

const Hypergraph& ExactEngine::graph() const noexcept { return *impl_->g; }
const DiffusionConfig& ExactEngine::config() const noexcept { return impl_->cfg; }

std::vector<double> ExactEngine::activation_probabilities(std::span<const NodeId> seeds) {
  const Mask m = impl_->seed_mask(seeds);
  impl_->spent = 0;
  return impl_->probabilities(impl_->initial(m));
}

double ExactEngine::expected_weight(std::span<const NodeId> seeds, std::span<const double> weights) {
  if (weights.size() != impl_->g->node_count()) {
    throw Error(ErrorCode::InvalidArgument, "weight vector length does not match node count");
  }
  const Mask m = impl_->seed_mask(seeds);
  if (!std::equal(weights.begin(), weights.end(), impl_->scalar_weights.begin(), impl_->scalar_weights.end())) {
    impl_->scalar_weights.assign(weights.begin(), weights.end());
    impl_->scalar_memo.clear();
  }
  impl_->spent = 0;
  return impl_->weight(impl_->initial(m));
}

double exact_spread(const Hypergraph& g, std::span<const double> weights, std::span<const NodeId> seeds,
                    const DiffusionConfig& cfg, std::size_t budget) {
  ExactEngine engine(g, cfg, budget);
  return engine.expected_weight(seeds, weights);
}

std::vector<NodeId> ReachabilityTable::canonical(std::span<const NodeId> sources) {
  std::vector<NodeId> key(sources.begin(), sources.end());
  std::sort(key.begin(), key.end());
  key.erase(std::unique(key.begin(), key.end()), key.end());
  return key;
}

void ReachabilityTable::insert(std::vector<NodeId> sources, std::vector<double> probabilities) {
  auto key = canonical(sources);
  for (NodeId v : key) {
    if (v < probabilities.size()) probabilities[v] = 0.0;
  }
  rows_[std::move(key)] = std::move(probabilities);
}

bool ReachabilityTable::contains(std::span<const NodeId> sources) const { return rows_.count(canonical(sources)) > 0; }

const std::vector<double>& ReachabilityTable::row(std::span<const NodeId> sources) const {
  const auto it = rows_.find(canonical(sources));
  if (it == rows_.end()) throw Error(ErrorCode::OutOfRange, "reachability table has no row for this source set");
  return it->second;
}

double ReachabilityTable::probability(std::span<const NodeId> sources, NodeId target) const {
  const auto& r = row(sources);
  if (target >= r.size()) throw Error(ErrorCode::OutOfRange, "target node out of range");
  return r[target];
}

ReachabilityTable reachability_table(const Hypergraph& g, const DiffusionConfig& cfg,
                                     std::span<const std::vector<NodeId>> sources, std::size_t budget) {
  ExactEngine engine(g, cfg, budget);
  ReachabilityTable table;
  for (const auto& src : sources) table.insert(src, engine.activation_probabilities(src));
  return table;
}

double closed_form_spread(std::span<const double> weights, const ReachabilityTable& table,
                          std::span<const NodeId> seeds) {
  const auto& r = table.row(seeds);
  if (r.size() != weights.size()) {
    throw Error(ErrorCode::InvalidArgument, "weight vector length does not match node count");
  }
  std::vector<bool> is_seed(weights.size(), false);
  for (NodeId u : seeds) {
    if (u >= weights.size()) throw Error(ErrorCode::OutOfRange, "seed node out of range");
    is_seed[u] = true;
  }
  double total = 0.0;
  for (std::size_t v = 0; v < weights.size(); ++v) {
    total += is_seed[v] ? weights[v] : weights[v] * r[v];
  }
  return total;
}

Epsilons compute_epsilons(ExactEngine& engine, std::span<const double> weights, std::size_t cap) {
  const std::size_t n = engine.graph().node_count();
  if (weights.size() != n) throw Error(ErrorCode::InvalidArgument, "weight vector length does not match node count");
  Epsilons out;
  if (n == 0) return out;
  cap = std::min(cap, n - 1);

  std::unordered_map<Mask, std::vector<double>> probs;
  auto row = [&](Mask m) -> const std::vector<double>& {
    auto it = probs.find(m);
    if (it != probs.end()) return it->second;
    std::vector<NodeId> seeds;
    for_each_node(m, [&](NodeId v) { seeds.push_back(v); });
    return probs.emplace(m, engine.activation_probabilities(seeds)).first->second;
  };

  // Every v1 with |v1| <= cap, including the empty set, grown by one node.
  std::vector<Mask> layer{0};
  for (std::size_t size = 0; size <= cap; ++size) {
    std::vector<Mask> next;
    for (Mask v1 : layer) {
      const std::vector<double> base = row(v1);
      for (NodeId w = 0; w < n; ++w) {
        if (v1 & bit(w)) continue;
        const Mask v2 = v1 | bit(w);
        const auto& grown = row(v2);
        for (NodeId x = 0; x < n; ++x) {
          if (v2 & bit(x)) continue;
          out.epsilon1 = std::max(out.epsilon1, std::abs(grown[x] - base[x]));
        }
        // Generate each superset once: only extend by nodes above v1's maximum.
        if (v1 == 0 || w > static_cast<NodeId>(63 - std::countl_zero(v1))) next.push_back(v2);
      }
    }
    layer = std::move(next);
  }

  for (NodeId v = 0; v < n; ++v) {
    // r[v] = 1: the source itself is the first node it reaches.
    const auto& r = row(bit(v));
    double mass = 0.0;
    for (NodeId x = 0; x < n; ++x) mass += std::abs(weights[x]) * r[x];
    out.epsilon2 = std::max(out.epsilon2, mass);
  }
  return out;
}

Epsilons compute_epsilons(const Hypergraph& g, std::span<const double> weights, const DiffusionConfig& cfg,
                          std::size_t cap, std::size_t budget) {
  ExactEngine engine(g, cfg, budget);
  return compute_epsilons(engine, weights, cap);
}

}  // namespace cauim
