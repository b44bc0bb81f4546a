#include "cauim/spread.hpp"

#include <algorithm>
#include <cmath>

#include "cauim/error.hpp"
#include "cauim/parallel.hpp"

namespace cauim {

namespace {

SpreadEstimate summarize(std::span<const double> per_round) {
  SpreadEstimate out;
  out.rounds = per_round.size();
  if (per_round.empty()) return out;
  double sum = 0.0;
  for (double v : per_round) sum += v;
  out.mean = sum / static_cast<double>(per_round.size());
  if (per_round.size() > 1) {
    double ss = 0.0;
    for (double v : per_round) ss += (v - out.mean) * (v - out.mean);
    const double var = ss / static_cast<double>(per_round.size() - 1);
    out.std_error = std::sqrt(var / static_cast<double>(per_round.size()));
  }
  return out;
}

void check_weights(const Hypergraph& g, std::span<const double> weights) {
  if (weights.size() != g.node_count()) {
    throw Error(ErrorCode::InvalidArgument, "weight vector length does not match node count");
  }
}

}  // namespace

SpreadEstimate mc_estimate(const Hypergraph& g, std::span<const double> weights, std::span<const NodeId> seeds,
                           const DiffusionConfig& cfg, std::size_t rounds, std::size_t workers) {
  if (rounds == 0) throw Error(ErrorCode::InvalidArgument, "Monte-Carlo needs at least one round");
  check_weights(g, weights);
  cfg.validate();
  if (seeds.empty()) return SpreadEstimate{0.0, 0.0, rounds};

  workers = std::min(resolve_workers(workers), rounds);
  std::vector<Propagator> engines(workers, Propagator(g, cfg));
  std::vector<double> per_round(rounds, 0.0);
  parallel_for(rounds, workers, [&](std::size_t r, std::size_t w) {
    Propagator& engine = engines[w];
    engine.run(seeds, r);
    double total = 0.0;
    for (NodeId v : engine.reached()) total += weights[v];
    per_round[r] = total;
  });
  return summarize(per_round);
}

WorldSample::WorldSample(const Hypergraph& g, std::vector<double> weights, DiffusionConfig cfg,
                         std::size_t rounds, std::size_t workers)
    : g_(&g), weights_(std::move(weights)), cfg_(std::move(cfg)), rounds_(rounds), workers_(resolve_workers(workers)) {
  if (rounds_ == 0) throw Error(ErrorCode::InvalidArgument, "Monte-Carlo needs at least one round");
  check_weights(g, weights_);
  cfg_.validate();
  engines_.assign(workers_, Propagator(g, cfg_));
  reset();
}

void WorldSample::reset() {
  seeds_.clear();
  times_.assign(rounds_ * g_->node_count(), kNever);
  totals_.assign(rounds_, 0.0);
}

double WorldSample::value() const {
  double sum = 0.0;
  for (double t : totals_) sum += t;
  return seeds_.empty() ? 0.0 : sum / static_cast<double>(rounds_);
}

SpreadEstimate WorldSample::estimate() const {
  if (seeds_.empty()) return SpreadEstimate{0.0, 0.0, rounds_};
  return summarize(totals_);
}

double WorldSample::gain_with(Propagator& engine, NodeId candidate) const {
  const std::size_t n = g_->node_count();
  const NodeId seed[1] = {candidate};
  double sum = 0.0;
  for (std::size_t r = 0; r < rounds_; ++r) {
    const std::span<const std::uint32_t> base(times_.data() + r * n, n);
    engine.run(seed, r, base);
    double round_gain = 0.0;
    for (NodeId v : engine.reached()) {
      if (base[v] == kNever) round_gain += weights_[v];
    }
    sum += round_gain;
  }
  return sum / static_cast<double>(rounds_);
}

double WorldSample::gain(NodeId candidate) const { return gain_with(engines_[0], candidate); }

std::vector<double> WorldSample::gains(std::span<const NodeId> candidates) const {
  std::vector<double> out(candidates.size(), 0.0);
  parallel_for(candidates.size(), workers_,
               [&](std::size_t i, std::size_t w) { out[i] = gain_with(engines_[w], candidates[i]); });
  return out;
}

void WorldSample::add(NodeId v) {
  if (v >= g_->node_count()) throw Error(ErrorCode::OutOfRange, "seed node out of range");
  if (std::find(seeds_.begin(), seeds_.end(), v) != seeds_.end()) return;
  const std::size_t n = g_->node_count();
  const NodeId seed[1] = {v};
  Propagator& engine = engines_[0];
  for (std::size_t r = 0; r < rounds_; ++r) {
    const std::span<std::uint32_t> base(times_.data() + r * n, n);
    engine.run(seed, r, base);
    const auto reached = engine.reached();
    for (std::size_t k = 0; k < reached.size(); ++k) {
      const NodeId x = reached[k];
      if (base[x] == kNever) totals_[r] += weights_[x];
      base[x] = engine.time_of(k);
    }
  }
  seeds_.push_back(v);
}

}  // namespace cauim
