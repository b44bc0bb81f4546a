#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "cauim/diffusion.hpp"
#include "cauim/hypergraph.hpp"
#include "cauim/selection.hpp"

namespace cauim::cli {

enum class Method { CauimGreedy, CauimCelf, CelfCount, Random };

std::string_view to_string(Method method);
Method parse_method(std::string_view text);

struct ExperimentConfig {
  std::vector<Method> methods{Method::CauimCelf};
  std::size_t k = 15;
  double p = 0.01;
  DiffusionModel model = DiffusionModel::SICP;
  std::uint32_t horizon = 5;
  EdgeChoice edge_choice = EdgeChoice::Uniform;
  std::shared_ptr<const PairProbabilities> pairs;
  std::size_t select_rounds = 25;
  std::size_t eval_rounds = 25;
  std::size_t reps = 20;
  std::uint64_t seed = 1;
  double noise = 0.0;
  bool stop_on_negative = false;
  std::size_t workers = 0;  // 0: hardware concurrency

  // Throws InvalidArgument for out-of-range values.
  void validate() const;
  DiffusionConfig diffusion(std::uint64_t world_seed) const;
};

// Every repetition owns independent streams for selection worlds,
// evaluation worlds, the ITE noise and the random baseline. They depend only
// on (master seed, rep), so all methods and all sweep points share them.
struct RepSeeds {
  std::uint64_t selection = 0;
  std::uint64_t evaluation = 0;
  std::uint64_t noise = 0;
  std::uint64_t random = 0;
};

RepSeeds rep_seeds(std::uint64_t master, std::size_t rep);

struct RepResult {
  SelectionTrace trace;
  std::vector<double> curve;  // evaluated σ̂ of each seed prefix
  double seconds = 0.0;
};

struct MethodRun {
  Method method = Method::CauimCelf;
  std::vector<RepResult> reps;
};

// One repetition: τ̂ + noise is both the selection objective (unit weights for
// celf-count) and the evaluation weight; evaluation uses fresh worlds.
RepResult run_repetition(const Hypergraph& g, std::span<const double> tau_hat, Method method,
                         const ExperimentConfig& config, std::size_t rep, std::size_t workers = 1);

// All methods x all repetitions; repetitions run concurrently, results are in
// (method, rep) order.
std::vector<MethodRun> run_experiment(const Hypergraph& g, std::span<const double> tau_hat,
                                      const ExperimentConfig& config);

struct ResultRow {
  Method method = Method::CauimCelf;
  std::size_t seed_count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation over repetitions
  std::size_t reps = 0;
  double wall_seconds = 0.0;  // mean per repetition; kept out of the result CSV
};

std::vector<ResultRow> summarize(const MethodRun& run);

// Versioned CSVs. Timing lives in its own file so result files replay byte for byte.
void write_results(std::ostream& out, std::span<const ResultRow> rows);
void write_traces(std::ostream& out, const Hypergraph& g, std::span<const MethodRun> runs);
void write_timing(std::ostream& out, std::span<const MethodRun> runs);

enum class SweepParam { Noise, P, Iter };

std::string_view to_string(SweepParam param);
SweepParam parse_sweep_param(std::string_view text);
std::vector<double> default_grid(SweepParam param);

struct SweepPoint {
  double value = 0.0;
  std::vector<MethodRun> runs;
  double seconds = 0.0;  // summed wall time of the point's repetitions
};

// Iter sets both select_rounds and eval_rounds. Repetitions of all grid
// points share one worker pool.
std::vector<SweepPoint> run_sweep(const Hypergraph& g, std::span<const double> tau_hat, const ExperimentConfig& base,
                                  SweepParam param, std::span<const double> grid);

void write_sweep(std::ostream& out, SweepParam param, std::span<const SweepPoint> points);
void write_sweep_timing(std::ostream& out, SweepParam param, std::span<const SweepPoint> points);

}  // namespace cauim::cli
