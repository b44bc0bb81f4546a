#include "cauim/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "cauim/error.hpp"
#include "cauim/io.hpp"
#include "cauim/rng.hpp"

namespace cauim {

std::string_view to_string(DiffusionModel model) {
  return model == DiffusionModel::GIC ? "gic" : "sicp";
}

DiffusionModel parse_model(std::string_view text) {
  if (text == "gic" || text == "GIC") return DiffusionModel::GIC;
  if (text == "sicp" || text == "SICP") return DiffusionModel::SICP;
  throw Error(ErrorCode::InvalidArgument, "unknown diffusion model '" + std::string(text) + "'");
}

std::string_view to_string(EdgeChoice choice) {
  return choice == EdgeChoice::Uniform ? "uniform" : "size";
}

EdgeChoice parse_edge_choice(std::string_view text) {
  if (text == "uniform") return EdgeChoice::Uniform;
  if (text == "size") return EdgeChoice::SizeProportional;
  throw Error(ErrorCode::InvalidArgument, "unknown edge choice '" + std::string(text) + "'");
}

void PairProbabilities::set(NodeId from, NodeId to, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidArgument, "pair probability outside [0,1]");
  table_[key(from, to)] = p;
}

std::optional<double> PairProbabilities::find(NodeId from, NodeId to) const {
  const auto it = table_.find(key(from, to));
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

PairProbabilities parse_pair_probabilities(std::istream& in, const Hypergraph& g) {
  PairProbabilities out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto fields = io::split(line, ',');
    if (fields.size() != 3) throw ParseError(line_no, "expected 'u,v,p'");
    if (line_no == 1 && fields[0] == "u" && fields[1] == "v") continue;
    const auto u = g.find_node(fields[0]);
    const auto v = g.find_node(fields[1]);
    if (!u || !v) throw ParseError(line_no, "unknown node label", ErrorCode::OutOfRange);
    const double p = io::parse_double(fields[2], line_no);
    if (!(p >= 0.0 && p <= 1.0)) throw ParseError(line_no, "probability outside [0,1]");
    out.set(*u, *v, p);
  }
  return out;
}

PairProbabilities load_pair_probabilities(const std::filesystem::path& path, const Hypergraph& g) {
  auto in = io::open_input(path);
  return parse_pair_probabilities(in, g);
}

void DiffusionConfig::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "activation probability must lie in [0,1]");
  }
}

std::span<const NodeId> SimulationTrace::layer(std::size_t t) const {
  if (t >= layer_end_.size()) throw Error(ErrorCode::OutOfRange, "trace layer out of range");
  return {order_.data(), layer_end_[t]};
}

std::span<const NodeId> SimulationTrace::newly_active(std::size_t t) const {
  if (t >= layer_end_.size()) throw Error(ErrorCode::OutOfRange, "trace layer out of range");
  const std::size_t begin = t == 0 ? 0 : layer_end_[t - 1];
  return {order_.data() + begin, layer_end_[t] - begin};
}

namespace {

// Stream-key domain for the GIC live-out sets, disjoint from SICP step indices.
constexpr std::uint64_t kGicDomain = 0x6769635f6c697665ULL;

}  // namespace

Propagator::Propagator(const Hypergraph& g, const DiffusionConfig& cfg)
    : g_(&g),
      cfg_(cfg),
      stamp_(g.node_count(), 0),
      edge_stamp_(g.edge_count(), 0),
      edge_reached_(g.edge_count(), 0) {
  cfg.validate();
  if (cfg.p > 0.0 && cfg.p < 1.0) inv_log_fail_ = 1.0 / std::log1p(-cfg.p);
  times_.reserve(64);
  order_.reserve(64);
}

void Propagator::mark(NodeId v, std::uint32_t t) {
  stamp_[v] = epoch_;
  order_.push_back(v);
  times_.push_back(t);
  if (cfg_.model == DiffusionModel::SICP) {
    for (EdgeId e : g_->star(v)) {
      if (edge_stamp_[e] != epoch_) {
        edge_stamp_[e] = epoch_;
        edge_reached_[e] = 0;
      }
      ++edge_reached_[e];
    }
  }
}

bool Propagator::saturated(NodeId v) const {
  for (EdgeId e : g_->star(v)) {
    const std::uint32_t reached = edge_stamp_[e] == epoch_ ? edge_reached_[e] : 0;
    if (reached < g_->edge_size(e)) return false;
  }
  return true;
}

// Calls hit(position) for every member position of the chosen hyperedge whose
// coin succeeds. With a scalar p the successes are drawn by geometric skips,
// which is distributionally identical to one Bernoulli(p) per member.
template <class Hit>
void Propagator::transmit_sicp(NodeId x, std::uint32_t t, std::uint64_t world, Hit&& hit) const {
  const auto star = g_->star(x);
  if (star.empty()) return;
  rng::Stream s(rng::derive(world, {static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(x)}));
  EdgeId e = star[0];
  if (star.size() > 1) {
    if (cfg_.edge_choice == EdgeChoice::Uniform) {
      e = star[s.below(star.size())];
    } else {
      std::size_t total = 0;
      for (EdgeId h : star) total += g_->edge_size(h);
      std::size_t pick = s.below(total);
      for (EdgeId h : star) {
        if (pick < g_->edge_size(h)) {
          e = h;
          break;
        }
        pick -= g_->edge_size(h);
      }
    }
  }
  const auto members = g_->members(e);
  if (cfg_.pair_probabilities) {
    for (NodeId y : members) {
      const double u = s.uniform();
      if (y != x && u < cfg_.probability(x, y)) hit(y);
    }
    return;
  }
  if (cfg_.p <= 0.0) return;
  if (cfg_.p >= 1.0) {
    for (NodeId y : members) {
      if (y != x) hit(y);
    }
    return;
  }
  const double size = static_cast<double>(members.size());
  double pos = -1.0;
  while (true) {
    pos += 1.0 + std::floor(std::log1p(-s.uniform()) * inv_log_fail_);
    if (pos >= size) break;
    const NodeId y = members[static_cast<std::size_t>(pos)];
    if (y != x) hit(y);
  }
}

template <class Hit>
void Propagator::transmit_gic(NodeId x, std::uint64_t world, Hit&& hit) const {
  const auto nbrs = g_->neighbors(x);
  if (nbrs.empty()) return;
  rng::Stream s(rng::derive(world, {kGicDomain, static_cast<std::uint64_t>(x)}));
  if (cfg_.pair_probabilities) {
    for (NodeId y : nbrs) {
      if (s.uniform() < cfg_.probability(x, y)) hit(y);
    }
    return;
  }
  if (cfg_.p <= 0.0) return;
  if (cfg_.p >= 1.0) {
    for (NodeId y : nbrs) hit(y);
    return;
  }
  const double size = static_cast<double>(nbrs.size());
  double pos = -1.0;
  while (true) {
    pos += 1.0 + std::floor(std::log1p(-s.uniform()) * inv_log_fail_);
    if (pos >= size) break;
    hit(nbrs[static_cast<std::size_t>(pos)]);
  }
}

void Propagator::run(std::span<const NodeId> seeds, std::uint64_t round, std::span<const std::uint32_t> base) {
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    std::fill(edge_stamp_.begin(), edge_stamp_.end(), 0);
    epoch_ = 1;
  }
  order_.clear();
  times_.clear();
  layer_end_.clear();
  acting_.clear();

  const bool has_base = !base.empty();
  auto base_time = [&](NodeId v) { return has_base ? base[v] : kNever; };

  for (NodeId v : seeds) {
    if (v >= g_->node_count()) throw Error(ErrorCode::OutOfRange, "seed node out of range");
    if (reached_already(v) || base_time(v) == 0) continue;
    mark(v, 0);
    acting_.push_back(v);
  }
  layer_end_.push_back(order_.size());

  const std::uint64_t world = rng::derive(cfg_.seed, round);
  const std::uint32_t horizon = cfg_.horizon;

  if (cfg_.model == DiffusionModel::GIC) {
    for (std::uint32_t t = 0; t < horizon && !acting_.empty(); ++t) {
      next_.clear();
      const std::uint32_t when = t + 1;
      for (NodeId x : acting_) {
        transmit_gic(x, world, [&](NodeId y) {
          if (reached_already(y) || base_time(y) <= when) return;
          mark(y, when);
          next_.push_back(y);
        });
      }
      layer_end_.push_back(order_.size());
      acting_.swap(next_);
    }
    return;
  }

  const bool silent = cfg_.p <= 0.0 && !cfg_.pair_probabilities;
  for (std::uint32_t t = 0; t < horizon; ++t) {
    // Nodes whose every hyperedge is fully reached can no longer transmit;
    // from base time on a node's activity is already covered by the base run.
    std::erase_if(acting_, [&](NodeId x) { return base_time(x) <= t || saturated(x); });
    if (acting_.empty() || silent) break;
    const std::uint32_t when = t + 1;
    const std::size_t before = order_.size();
    for (NodeId x : acting_) {
      transmit_sicp(x, t, world, [&](NodeId y) {
        if (reached_already(y) || base_time(y) <= when) return;
        mark(y, when);
      });
    }
    for (std::size_t k = before; k < order_.size(); ++k) acting_.push_back(order_[k]);
    layer_end_.push_back(order_.size());
  }
}

SimulationTrace Propagator::trace() const {
  SimulationTrace out;
  out.order_ = order_;
  out.layer_end_ = layer_end_;
  return out;
}

namespace {

SimulationTrace simulate(const Hypergraph& g, std::span<const NodeId> seeds, const DiffusionConfig& cfg,
                         std::uint64_t round) {
  Propagator engine(g, cfg);
  engine.run(seeds, round);
  return engine.trace();
}

}  // namespace

SimulationTrace run_gic(const Hypergraph& g, std::span<const NodeId> seeds, const DiffusionConfig& cfg,
                        std::uint64_t round) {
  DiffusionConfig c = cfg;
  c.model = DiffusionModel::GIC;
  return simulate(g, seeds, c, round);
}

SimulationTrace run_sicp(const Hypergraph& g, std::span<const NodeId> seeds, const DiffusionConfig& cfg,
                         std::uint64_t round) {
  DiffusionConfig c = cfg;
  c.model = DiffusionModel::SICP;
  return simulate(g, seeds, c, round);
}

SimulationTrace run(const Hypergraph& g, std::span<const NodeId> seeds, const DiffusionConfig& cfg,
                    std::uint64_t round) {
  return cfg.model == DiffusionModel::GIC ? run_gic(g, seeds, cfg, round) : run_sicp(g, seeds, cfg, round);
}

void write_trace(std::ostream& out, const Hypergraph& g, const SimulationTrace& trace) {
  for (std::size_t t = 0; t <= trace.steps(); ++t) {
    out << t;
    for (NodeId v : trace.newly_active(t)) out << '\t' << g.node_label(v);
    out << '\n';
  }
}

}  // namespace cauim
