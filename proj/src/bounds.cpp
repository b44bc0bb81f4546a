#include "cauim/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <ostream>

#include "cauim/causal.hpp"
#include "cauim/error.hpp"
#include "cauim/io.hpp"
#include "cauim/parallel.hpp"
#include "cauim/rng.hpp"
#include "cauim/selection.hpp"

namespace cauim {

namespace {

constexpr double kOneMinusInvE = 1.0 - 1.0 / std::numbers::e;
constexpr double kZeroSigma = 1e-12;

std::vector<NodeId> set_union(std::span<const NodeId> a, std::span<const NodeId> b) {
  std::vector<NodeId> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Exact σ for several weightings from one set of activation probabilities.
class SetSpread {
 public:
  explicit SetSpread(ExactEngine& engine) : engine_(&engine) {}

  double operator()(std::span<const NodeId> seeds, std::span<const double> weights) {
    std::vector<NodeId> key(seeds.begin(), seeds.end());
    std::sort(key.begin(), key.end());
    key.erase(std::unique(key.begin(), key.end()), key.end());
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, engine_->activation_probabilities(key)).first;
    double total = 0.0;
    for (std::size_t v = 0; v < weights.size(); ++v) total += weights[v] * it->second[v];
    return total;
  }

 private:
  ExactEngine* engine_;
  std::map<std::vector<NodeId>, std::vector<double>> cache_;
};

template <class Fn>
void for_each_subset(std::size_t n, std::size_t min_size, std::size_t max_size, Fn&& fn) {
  std::vector<NodeId> pick;
  auto rec = [&](auto&& self, NodeId next) -> void {
    if (pick.size() >= min_size) fn(std::span<const NodeId>(pick));
    if (pick.size() == max_size) return;
    for (NodeId v = next; v < n; ++v) {
      pick.push_back(v);
      self(self, v + 1);
      pick.pop_back();
    }
  };
  rec(rec, 0);
}

void check_instance(const Instance& instance) {
  if (instance.tau_hat.size() != instance.graph.node_count()) {
    throw Error(ErrorCode::InvalidArgument, "tau_hat does not cover every node");
  }
  if (instance.k == 0 || instance.k > instance.graph.node_count()) {
    throw Error(ErrorCode::InvalidArgument, "K must lie in [1, node_count]");
  }
}

std::size_t epsilon_cap(const BoundOptions& options, const Instance& instance) {
  return std::min(options.epsilon_cap, instance.graph.node_count() - 1);
}

}  // namespace

bool ClaimsReport::all_hold() const {
  auto ok = [](const std::vector<ClaimCheck>& v) {
    return std::all_of(v.begin(), v.end(), [](const ClaimCheck& c) { return c.holds(); });
  };
  return ok(claim1) && ok(claim2) && ok(claim3);
}

double theorem1_rhs(double sigma_opt, std::size_t k, double epsilon1, double epsilon2) {
  const double kk = static_cast<double>(k);
  return kOneMinusInvE * (sigma_opt - kk * epsilon1 * epsilon2) - epsilon2 * std::exp(1.0 / kk - 1.0);
}

double theorem2_rhs(double sigma_opt, std::size_t k, double epsilon1, double epsilon2, double epsilon) {
  const double kk = static_cast<double>(k);
  return (kOneMinusInvE - epsilon) * (sigma_opt - kk * epsilon1 * epsilon2) - epsilon2 * std::exp(1.0 / kk - 1.0);
}

double gamma_limit(double epsilon, std::size_t k) {
  const double r = epsilon / static_cast<double>(k);
  return r / (2.0 + r);
}

double epsilon_for_gamma(double gamma, std::size_t k) {
  if (gamma >= 1.0) return std::numeric_limits<double>::infinity();
  double epsilon = 2.0 * gamma * static_cast<double>(k) / (1.0 - gamma);
  // Rounding can leave the closed form a few ulps short of admissible.
  while (!gamma_condition_ok(gamma, epsilon, k)) epsilon = std::nextafter(epsilon, INFINITY);
  return epsilon;
}

bool gamma_condition_ok(double gamma, double epsilon, std::size_t k) {
  if (!(gamma >= 0.0) || gamma >= 1.0) return false;
  return gamma <= gamma_limit(epsilon, k);
}

BoundReport verify_theorem1(const Instance& instance, const BoundOptions& options) {
  check_instance(instance);
  ExactEngine engine(instance.graph, instance.cfg, options.budget);
  const auto& w = instance.tau_hat;

  BoundReport r;
  r.k = instance.k;
  ExactOracle oracle(engine, w);
  const SelectionTrace trace = greedy_select(oracle, instance.k);
  r.greedy_seeds = trace.seeds;
  r.sigma_greedy = trace.sigma_curve.back();

  const OptimalSet opt = brute_force_optimal(engine, w, instance.k);
  r.optimal_seeds = opt.seeds;
  r.sigma_opt = opt.sigma;

  const Epsilons eps = compute_epsilons(engine, w, epsilon_cap(options, instance));
  r.epsilon1 = eps.epsilon1;
  r.epsilon2 = eps.epsilon2;
  r.rhs = theorem1_rhs(r.sigma_opt, r.k, r.epsilon1, r.epsilon2);
  r.slack = r.sigma_greedy - r.rhs;
  r.holds = r.slack >= -kBoundTolerance;

  r.nonnegative = std::all_of(w.begin(), w.end(), [](double x) { return x >= 0.0; });
  if (r.nonnegative) {
    r.rhs_classic = kOneMinusInvE * r.sigma_opt;
    r.holds_classic = r.sigma_greedy - r.rhs_classic >= -kBoundTolerance;
  }

  if (options.check_claims) {
    auto sigma = [&](std::span<const NodeId> s) { return s.empty() ? 0.0 : engine.expected_weight(s, w); };
    const std::size_t k = r.k;
    const double e12 = r.epsilon1 * r.epsilon2;
    const std::span<const NodeId> opt_head(opt.seeds.data(), k - 1);
    for (std::size_t i = 0; i < k; ++i) {
      const std::span<const NodeId> si(trace.seeds.data(), i);
      const std::span<const NodeId> si1(trace.seeds.data(), i + 1);
      const double s_i = sigma(si);
      const double s_i1 = sigma(si1);
      const double s_opt_union = sigma(set_union(opt.seeds, si));
      const double s_head_union = sigma(set_union(si, opt_head));
      r.claims.claim1.push_back({i, r.sigma_opt, s_opt_union + static_cast<double>(i) * r.epsilon2});
      r.claims.claim2.push_back({i, s_opt_union, s_i1 - s_i + s_head_union + e12});
      r.claims.claim3.push_back({i, s_head_union,
                                 static_cast<double>(k - 1) * (s_i1 - s_i) + s_i + static_cast<double>(k - 1) * e12});
    }
  }
  return r;
}

RobustnessReport verify_theorem2(const Instance& instance, double gamma, std::optional<double> epsilon,
                                 const BoundOptions& options) {
  check_instance(instance);
  if (!(gamma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be non-negative");
  ExactEngine engine(instance.graph, instance.cfg, options.budget);
  const auto& w = instance.tau_hat;
  const std::size_t n = instance.graph.node_count();

  RobustnessReport r;
  r.gamma = gamma;
  r.k = instance.k;
  r.epsilon = epsilon ? *epsilon : epsilon_for_gamma(gamma, r.k);
  r.condition_ok = gamma == 0.0 ? true : gamma_condition_ok(gamma, r.epsilon, r.k);

  auto sigma = [&](std::span<const NodeId> s) { return s.empty() ? 0.0 : engine.expected_weight(s, w); };

  // Perturbation is decided per prefix: among the extensions of the committed
  // prefix, the one with the largest true σ (smallest id on ties) is scaled
  // down and all others up.
  std::map<std::vector<NodeId>, NodeId> best_extension;
  auto perturbed = [&](std::span<const NodeId> s) -> double {
    if (s.empty()) return 0.0;
    const double exact = sigma(s);
    if (gamma == 0.0) return exact;
    std::vector<NodeId> prefix(s.begin(), s.end() - 1);
    auto it = best_extension.find(prefix);
    if (it == best_extension.end()) {
      NodeId best = 0;
      double best_value = -std::numeric_limits<double>::infinity();
      std::vector<NodeId> with = prefix;
      with.push_back(0);
      for (NodeId v = 0; v < n; ++v) {
        if (std::find(prefix.begin(), prefix.end(), v) != prefix.end()) continue;
        with.back() = v;
        const double value = sigma(with);
        if (value > best_value) {
          best_value = value;
          best = v;
        }
      }
      it = best_extension.emplace(std::move(prefix), best).first;
    }
    const double shift = gamma * std::abs(exact);
    return s.back() == it->second ? exact - shift : exact + shift;
  };

  SetFunctionOracle oracle(n, perturbed);
  const SelectionTrace trace = greedy_select(oracle, r.k);
  r.seeds = trace.seeds;
  r.perturbed_sigma = trace.sigma_curve.back();
  r.sigma_greedy = sigma(r.seeds);

  const OptimalSet opt = brute_force_optimal(engine, w, r.k);
  r.sigma_opt = opt.sigma;
  const Epsilons eps = compute_epsilons(engine, w, epsilon_cap(options, instance));
  r.epsilon1 = eps.epsilon1;
  r.epsilon2 = eps.epsilon2;
  r.rhs = gamma >= 1.0 ? -std::numeric_limits<double>::infinity()
                       : theorem2_rhs(r.sigma_opt, r.k, r.epsilon1, r.epsilon2, r.epsilon);
  r.slack = r.sigma_greedy - r.rhs;
  r.holds = r.slack >= -kBoundTolerance;
  return r;
}

RobustnessReport verify_corollary1(const Instance& instance, std::optional<double> delta,
                                   const BoundOptions& options) {
  check_instance(instance);
  if (!instance.tau_true || instance.tau_true->size() != instance.graph.node_count()) {
    throw Error(ErrorCode::InvalidArgument, "corollary check needs tau_true for every node");
  }
  ExactEngine engine(instance.graph, instance.cfg, options.budget);
  SetSpread spread(engine);
  const std::size_t n = instance.graph.node_count();
  const auto& tau = *instance.tau_true;
  const auto& tau_hat = instance.tau_hat;
  const std::vector<double> ones(n, 1.0);

  RobustnessReport r;
  r.k = instance.k;
  for (std::size_t v = 0; v < n; ++v) r.delta = std::max(r.delta, std::abs(tau_hat[v] - tau[v]));
  if (delta) r.delta = std::max(r.delta, *delta);

  struct Row {
    double sigma, naive, estimated;
  };
  std::vector<Row> rows;
  double max_ratio = 0.0;
  OptimalSet opt;
  bool have_opt = false;
  for_each_subset(n, 1, r.k, [&](std::span<const NodeId> s) {
    const Row row{spread(s, tau), spread(s, ones), spread(s, tau_hat)};
    if (s.size() == r.k && (!have_opt || row.sigma > opt.sigma)) {
      opt.seeds.assign(s.begin(), s.end());
      opt.sigma = row.sigma;
      have_opt = true;
    }
    if (std::abs(row.sigma) < kZeroSigma) {
      ++r.excluded_sets;
      return;
    }
    max_ratio = std::max(max_ratio, std::abs(row.naive / row.sigma));
    rows.push_back(row);
  });
  r.gamma = r.delta * max_ratio;
  for (const Row& row : rows) {
    if (std::abs(row.estimated / row.sigma - 1.0) > r.gamma + kBoundTolerance) r.premise_ok = false;
  }
  r.epsilon = epsilon_for_gamma(r.gamma, r.k);
  r.condition_ok = r.gamma == 0.0 ? true : gamma_condition_ok(r.gamma, r.epsilon, r.k);

  SetFunctionOracle oracle(n, [&](std::span<const NodeId> s) { return s.empty() ? 0.0 : spread(s, tau_hat); });
  const SelectionTrace trace = greedy_select(oracle, r.k);
  r.seeds = trace.seeds;
  r.perturbed_sigma = trace.sigma_curve.back();
  r.sigma_greedy = spread(r.seeds, tau);
  r.sigma_opt = opt.sigma;

  const Epsilons eps = compute_epsilons(engine, tau, epsilon_cap(options, instance));
  r.epsilon1 = eps.epsilon1;
  r.epsilon2 = eps.epsilon2;
  r.rhs = r.gamma >= 1.0 ? -std::numeric_limits<double>::infinity()
                         : theorem2_rhs(r.sigma_opt, r.k, r.epsilon1, r.epsilon2, r.epsilon);
  r.slack = r.sigma_greedy - r.rhs;
  r.holds = r.slack >= -kBoundTolerance;
  return r;
}

double bounded_increment_excess(const Instance& instance, double epsilon1, double epsilon2, std::size_t max_size,
                                std::size_t budget) {
  check_instance(instance);
  ExactEngine engine(instance.graph, instance.cfg, budget);
  SetSpread spread(engine);
  const auto& w = instance.tau_hat;
  const std::size_t n = instance.graph.node_count();
  auto sigma = [&](std::span<const NodeId> s) { return s.empty() ? 0.0 : spread(s, w); };
  double worst = -std::numeric_limits<double>::infinity();
  if (max_size == 0) return worst;
  for_each_subset(n, 0, max_size - 1, [&](std::span<const NodeId> s) {
    const double base_s = sigma(s);
    for (NodeId x = 0; x < n; ++x) {
      if (std::find(s.begin(), s.end(), x) != s.end()) continue;
      const auto t = set_union(s, std::vector<NodeId>{x});
      const double base_t = sigma(t);
      for (NodeId v = 0; v < n; ++v) {
        if (std::find(t.begin(), t.end(), v) != t.end()) continue;
        const double gain_s = sigma(set_union(s, std::vector<NodeId>{v})) - base_s;
        const double gain_t = sigma(set_union(t, std::vector<NodeId>{v})) - base_t;
        worst = std::max(worst, std::abs(gain_s - gain_t) - epsilon1 * epsilon2);
      }
    }
  });
  return worst;
}

namespace {

constexpr std::uint64_t kInstanceDomain = 0x696e7374616e6365ULL;

template <class T>
const T& pick(rng::Stream& s, const std::vector<T>& values) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "empty choice list in instance spec");
  return values[s.below(values.size())];
}

struct Structure {
  std::size_t nodes;
  std::vector<std::vector<NodeId>> edges;
};

Structure random_structure(const InstanceSpec& spec, rng::Stream& s) {
  if (spec.min_nodes == 0 || spec.min_nodes > spec.max_nodes || spec.max_nodes > 64) {
    throw Error(ErrorCode::InvalidArgument, "instance spec needs 1 <= min_nodes <= max_nodes <= 64");
  }
  if (spec.max_edges == 0 || spec.max_edge_size == 0) {
    throw Error(ErrorCode::InvalidArgument, "instance spec needs at least one hyperedge of size >= 1");
  }
  Structure out;
  out.nodes = spec.min_nodes + s.below(spec.max_nodes - spec.min_nodes + 1);
  const std::size_t m = 1 + s.below(spec.max_edges);
  std::vector<NodeId> perm(out.nodes);
  for (std::size_t e = 0; e < m; ++e) {
    const std::size_t size = 1 + s.below(std::min(spec.max_edge_size, out.nodes));
    std::iota(perm.begin(), perm.end(), NodeId{0});
    for (std::size_t i = 0; i < size; ++i) std::swap(perm[i], perm[i + s.below(out.nodes - i)]);
    out.edges.emplace_back(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(size));
  }
  return out;
}

Instance instance_with_structure(const InstanceSpec& spec, rng::Stream& s, std::uint64_t seed,
                                 const Structure& structure) {
  Instance inst;
  inst.graph = Hypergraph(structure.nodes, structure.edges);
  inst.cfg.model = pick(s, spec.models);
  inst.cfg.p = pick(s, spec.p_values);
  inst.cfg.horizon = pick(s, spec.horizons);
  inst.cfg.seed = seed;
  inst.k = std::min(pick(s, spec.k_values), structure.nodes);
  return inst;
}

}  // namespace

Instance random_instance(const InstanceSpec& spec, std::uint64_t seed) {
  rng::Stream s(rng::derive(seed, kInstanceDomain));
  const Structure structure = random_structure(spec, s);
  Instance inst = instance_with_structure(spec, s, seed, structure);
  inst.tau_hat.resize(structure.nodes);
  for (double& t : inst.tau_hat) {
    switch (spec.tau_mode) {
      case TauMode::Mixed: t = spec.tau_range * (2.0 * s.uniform() - 1.0); break;
      case TauMode::Ones: t = 1.0; break;
      case TauMode::Nonnegative: t = spec.tau_range * s.uniform(); break;
    }
  }
  return inst;
}

Instance random_causal_instance(const InstanceSpec& spec, std::uint64_t seed, std::size_t extra_nodes) {
  rng::Stream s(rng::derive(seed, kInstanceDomain));
  const Structure structure = random_structure(spec, s);
  Instance inst = instance_with_structure(spec, s, seed, structure);

  // Filler population: disjoint groups of 2 to 4 nodes.
  const std::size_t n = structure.nodes;
  std::vector<std::vector<NodeId>> edges = structure.edges;
  for (std::size_t v = 0; v < extra_nodes;) {
    const std::size_t size = std::min<std::size_t>(2 + s.below(3), extra_nodes - v);
    std::vector<NodeId> edge;
    for (std::size_t i = 0; i < size; ++i) edge.push_back(static_cast<NodeId>(n + v + i));
    edges.push_back(std::move(edge));
    v += size;
  }
  const Hypergraph population(n + extra_nodes, std::move(edges));
  constexpr std::size_t dim = 2;
  const NodeCausalTable table = simulate_outcomes(population, dim, SimulationParams::defaults(dim), seed);
  const IteEstimate est = estimate_ite(population, observed(table), 1.0);
  inst.tau_hat.assign(est.tau_hat.begin(), est.tau_hat.begin() + static_cast<std::ptrdiff_t>(n));
  inst.tau_true.emplace(table.tau_true->begin(), table.tau_true->begin() + static_cast<std::ptrdiff_t>(n));
  return inst;
}

void save_instance(const std::filesystem::path& dir, const Instance& instance) {
  std::filesystem::create_directories(dir);
  save_hypergraph(dir / "graph.txt", instance.graph);
  {
    auto out = io::open_output(dir / "weights.csv");
    out << "node,tau_hat" << (instance.tau_true ? ",tau_true" : "") << '\n';
    for (NodeId v = 0; v < instance.graph.node_count(); ++v) {
      out << instance.graph.node_label(v) << ',' << io::format_double(instance.tau_hat[v]);
      if (instance.tau_true) out << ',' << io::format_double((*instance.tau_true)[v]);
      out << '\n';
    }
  }
  auto out = io::open_output(dir / "instance.cfg");
  out << "model = " << to_string(instance.cfg.model) << '\n'
      << "p = " << io::format_double(instance.cfg.p) << '\n'
      << "horizon = " << instance.cfg.horizon << '\n'
      << "seed = " << instance.cfg.seed << '\n'
      << "edge_choice = " << to_string(instance.cfg.edge_choice) << '\n'
      << "k = " << instance.k << '\n';
}

Instance load_instance(const std::filesystem::path& dir) {
  Instance inst;
  inst.graph = load_hypergraph(dir / "graph.txt");
  const std::size_t n = inst.graph.node_count();
  {
    auto in = io::open_input(dir / "weights.csv");
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "weights.csv: missing header");
    const bool has_truth = io::trim(line) == "node,tau_hat,tau_true";
    if (!has_truth && io::trim(line) != "node,tau_hat") throw ParseError(1, "weights.csv: unexpected header");
    inst.tau_hat.assign(n, 0.0);
    if (has_truth) inst.tau_true.emplace(n, 0.0);
    std::size_t line_no = 1;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (io::trim(line).empty()) continue;
      const auto fields = io::split(io::trim(line), ',');
      if (fields.size() != (has_truth ? 3u : 2u)) throw ParseError(line_no, "weights.csv: wrong column count");
      const auto v = inst.graph.find_node(fields[0]);
      if (!v) throw ParseError(line_no, "weights.csv: unknown node", ErrorCode::OutOfRange);
      inst.tau_hat[*v] = io::parse_double(fields[1], line_no);
      if (has_truth) (*inst.tau_true)[*v] = io::parse_double(fields[2], line_no);
      ++rows;
    }
    if (rows != n) throw Error(ErrorCode::ParseError, "weights.csv must list every node once");
  }
  auto in = io::open_input(dir / "instance.cfg");
  for (const auto& [key, value] : io::parse_key_values(in)) {
    if (key == "model") {
      inst.cfg.model = parse_model(value);
    } else if (key == "p") {
      inst.cfg.p = io::parse_double(value, 0);
    } else if (key == "horizon") {
      inst.cfg.horizon = static_cast<std::uint32_t>(io::parse_uint(value, 0));
    } else if (key == "seed") {
      inst.cfg.seed = io::parse_uint(value, 0);
    } else if (key == "edge_choice") {
      inst.cfg.edge_choice = parse_edge_choice(value);
    } else if (key == "k") {
      inst.k = static_cast<std::size_t>(io::parse_uint(value, 0));
    } else {
      throw Error(ErrorCode::ParseError, "instance.cfg: unknown key '" + key + "'");
    }
  }
  inst.cfg.validate();
  return inst;
}

namespace {

Instance without_node(const Instance& inst, NodeId drop) {
  const std::size_t n = inst.graph.node_count();
  auto remap = [&](NodeId v) { return v < drop ? v : v - 1; };
  std::vector<std::vector<NodeId>> edges;
  std::vector<std::string> edge_labels;
  for (EdgeId e = 0; e < inst.graph.edge_count(); ++e) {
    std::vector<NodeId> members;
    for (NodeId v : inst.graph.members(e)) {
      if (v != drop) members.push_back(remap(v));
    }
    if (!members.empty()) {
      edges.push_back(std::move(members));
      edge_labels.push_back(inst.graph.edge_label(e));
    }
  }
  std::vector<std::string> labels;
  for (NodeId v = 0; v < n; ++v) {
    if (v != drop) labels.push_back(inst.graph.node_label(v));
  }
  Instance out = inst;
  out.graph = Hypergraph(n - 1, std::move(edges), std::move(labels), std::move(edge_labels));
  out.tau_hat.erase(out.tau_hat.begin() + drop);
  if (out.tau_true) out.tau_true->erase(out.tau_true->begin() + drop);
  out.k = std::min(out.k, n - 1);
  return out;
}

Instance with_edges(const Instance& inst, std::vector<std::vector<NodeId>> edges, std::vector<std::string> labels) {
  std::vector<std::string> node_labels;
  for (NodeId v = 0; v < inst.graph.node_count(); ++v) node_labels.push_back(inst.graph.node_label(v));
  Instance out = inst;
  out.graph = Hypergraph(inst.graph.node_count(), std::move(edges), std::move(node_labels), std::move(labels));
  return out;
}

std::vector<Instance> shrink_candidates(const Instance& inst) {
  std::vector<Instance> out;
  const auto& g = inst.graph;
  if (g.node_count() > 1) {
    for (NodeId v = 0; v < g.node_count(); ++v) out.push_back(without_node(inst, v));
  }
  std::vector<std::vector<NodeId>> edges;
  std::vector<std::string> labels;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    edges.emplace_back(g.members(e).begin(), g.members(e).end());
    labels.push_back(g.edge_label(e));
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    auto fewer = edges;
    auto fewer_labels = labels;
    fewer.erase(fewer.begin() + static_cast<std::ptrdiff_t>(e));
    fewer_labels.erase(fewer_labels.begin() + static_cast<std::ptrdiff_t>(e));
    out.push_back(with_edges(inst, std::move(fewer), std::move(fewer_labels)));
    if (edges[e].size() > 1) {
      for (std::size_t i = 0; i < edges[e].size(); ++i) {
        auto smaller = edges;
        smaller[e].erase(smaller[e].begin() + static_cast<std::ptrdiff_t>(i));
        out.push_back(with_edges(inst, std::move(smaller), labels));
      }
    }
  }
  if (inst.k > 1) {
    Instance c = inst;
    --c.k;
    out.push_back(std::move(c));
  }
  if (inst.cfg.horizon > 1) {
    Instance c = inst;
    --c.cfg.horizon;
    out.push_back(std::move(c));
  }
  // Weight simplification: one decimal, then unit magnitude.
  auto simplified = [&](auto&& f) {
    Instance c = inst;
    for (double& t : c.tau_hat) t = f(t);
    if (c.tau_true) {
      for (double& t : *c.tau_true) t = f(t);
    }
    if (c.tau_hat != inst.tau_hat || c.tau_true != inst.tau_true) out.push_back(std::move(c));
  };
  simplified([](double t) { return std::round(t * 10.0) / 10.0; });
  simplified([](double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); });
  return out;
}

bool still_fails(const std::function<bool(const Instance&)>& fails, const Instance& inst) {
  try {
    return fails(inst);
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

Instance shrink_instance(Instance instance, const std::function<bool(const Instance&)>& fails) {
  bool progress = true;
  while (progress) {
    progress = false;
    for (Instance& candidate : shrink_candidates(instance)) {
      if (still_fails(fails, candidate)) {
        instance = std::move(candidate);
        progress = true;
        break;
      }
    }
  }
  return instance;
}

bool CampaignRow::holds() const {
  if (skipped) return true;
  if (bound) return bound->holds && bound->holds_classic;
  if (robust) return robust->holds;
  return false;
}

std::size_t CampaignResult::failures() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const CampaignRow& r) { return !r.holds(); }));
}

std::size_t CampaignResult::skipped() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const CampaignRow& r) { return r.skipped; }));
}

namespace {

bool instance_fails(const CampaignConfig& config, const Instance& inst) {
  switch (config.check) {
    case CampaignCheck::Theorem1: {
      const auto r = verify_theorem1(inst, config.options);
      return !(r.holds && r.holds_classic);
    }
    case CampaignCheck::Theorem2: return !verify_theorem2(inst, config.gamma, {}, config.options).holds;
    case CampaignCheck::Corollary1: return !verify_corollary1(inst, {}, config.options).holds;
  }
  return false;
}

}  // namespace

CampaignResult run_campaign(const CampaignConfig& config) {
  CampaignResult result;
  result.rows.resize(config.count);
  std::vector<std::optional<Instance>> failing(config.count);
  parallel_for(config.count, resolve_workers(config.workers), [&](std::size_t i, std::size_t) {
    CampaignRow& row = result.rows[i];
    row.index = i;
    row.seed = rng::derive(config.seed, i);
    const Instance inst = config.check == CampaignCheck::Corollary1 ? random_causal_instance(config.spec, row.seed)
                                                                    : random_instance(config.spec, row.seed);
    row.nodes = inst.graph.node_count();
    row.edges = inst.graph.edge_count();
    row.model = inst.cfg.model;
    row.p = inst.cfg.p;
    row.horizon = inst.cfg.horizon;
    row.k = inst.k;
    try {
      switch (config.check) {
        case CampaignCheck::Theorem1: row.bound = verify_theorem1(inst, config.options); break;
        case CampaignCheck::Theorem2: row.robust = verify_theorem2(inst, config.gamma, {}, config.options); break;
        case CampaignCheck::Corollary1: row.robust = verify_corollary1(inst, {}, config.options); break;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BudgetExceeded) throw;
      row.skipped = true;
      row.error = e.what();
    }
    if (!row.holds()) failing[i] = inst;
  });

  if (!config.counterexample_dir.empty()) {
    for (std::size_t i = 0; i < config.count; ++i) {
      if (!failing[i]) continue;
      CampaignConfig cheap = config;
      cheap.options.check_claims = false;
      const Instance small = shrink_instance(*failing[i], [&](const Instance& c) { return instance_fails(cheap, c); });
      const auto dir = config.counterexample_dir / ("case_" + std::to_string(i));
      save_instance(dir, small);
      result.counterexamples.push_back(dir);
    }
  }
  return result;
}

void write_campaign_csv(std::ostream& out, const CampaignResult& result) {
  out << "# cauim-campaign v1\n";
  out << "index,seed,model,p,horizon,k,nodes,edges,status,sigma_greedy,sigma_opt,epsilon1,epsilon2,gamma,epsilon,"
         "condition_ok,rhs,slack,holds,classic_holds,claims_hold\n";
  for (const CampaignRow& row : result.rows) {
    out << row.index << ',' << row.seed << ',' << to_string(row.model) << ',' << io::format_double(row.p) << ','
        << row.horizon << ',' << row.k << ',' << row.nodes << ',' << row.edges << ',';
    if (row.skipped) {
      out << "skipped,,,,,,,,,,,,\n";
      continue;
    }
    if (row.bound) {
      const BoundReport& b = *row.bound;
      out << "ok," << io::format_double(b.sigma_greedy) << ',' << io::format_double(b.sigma_opt) << ','
          << io::format_double(b.epsilon1) << ',' << io::format_double(b.epsilon2) << ",0,0,1,"
          << io::format_double(b.rhs) << ',' << io::format_double(b.slack) << ',' << (b.holds ? 1 : 0) << ','
          << (b.holds_classic ? 1 : 0) << ',' << (b.claims.all_hold() ? 1 : 0) << '\n';
    } else if (row.robust) {
      const RobustnessReport& r = *row.robust;
      out << "ok," << io::format_double(r.sigma_greedy) << ',' << io::format_double(r.sigma_opt) << ','
          << io::format_double(r.epsilon1) << ',' << io::format_double(r.epsilon2) << ','
          << io::format_double(r.gamma) << ',' << io::format_double(r.epsilon) << ',' << (r.condition_ok ? 1 : 0)
          << ',' << io::format_double(r.rhs) << ',' << io::format_double(r.slack) << ',' << (r.holds ? 1 : 0)
          << ",,\n";
    }
  }
}

void write_campaign_summary(std::ostream& out, const CampaignResult& result) {
  const std::size_t total = result.rows.size();
  const std::size_t skipped = result.skipped();
  const std::size_t failures = result.failures();
  std::size_t claims_checked = 0;
  std::size_t claims_fail = 0;
  for (const CampaignRow& row : result.rows) {
    if (row.bound && !row.bound->claims.claim1.empty()) {
      ++claims_checked;
      if (!row.bound->claims.all_hold()) ++claims_fail;
    }
  }
  out << "instances: " << total << "\n";
  out << "evaluated: " << total - skipped << "\n";
  out << "skipped (budget): " << skipped << "\n";
  out << "bound violations: " << failures << "\n";
  if (claims_checked > 0) out << "instances with a claim violation: " << claims_fail << " of " << claims_checked << "\n";
  for (const auto& path : result.counterexamples) out << "counterexample: " << path.string() << "\n";
}

}  // namespace cauim
