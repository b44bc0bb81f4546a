#include "cauim/cli/experiment.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>
#include <string>

#include "cauim/causal.hpp"
#include "cauim/error.hpp"
#include "cauim/io.hpp"
#include "cauim/parallel.hpp"
#include "cauim/rng.hpp"

namespace cauim::cli {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::CauimGreedy: return "cauim-greedy";
    case Method::CauimCelf: return "cauim-celf";
    case Method::CelfCount: return "celf-count";
    case Method::Random: return "random";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  for (Method m : {Method::CauimGreedy, Method::CauimCelf, Method::CelfCount, Method::Random}) {
    if (text == to_string(m)) return m;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown method '" + std::string(text) + "'");
}

void ExperimentConfig::validate() const {
  if (methods.empty()) throw Error(ErrorCode::InvalidArgument, "no method given");
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "K must be at least 1");
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidArgument, "p must lie in [0, 1]");
  if (select_rounds == 0 || eval_rounds == 0) throw Error(ErrorCode::InvalidArgument, "MC rounds must be positive");
  if (reps == 0) throw Error(ErrorCode::InvalidArgument, "repetitions must be positive");
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw Error(ErrorCode::InvalidArgument, "noise must be >= 0");
}

DiffusionConfig ExperimentConfig::diffusion(std::uint64_t world_seed) const {
  DiffusionConfig cfg;
  cfg.model = model;
  cfg.p = p;
  cfg.horizon = horizon;
  cfg.seed = world_seed;
  cfg.edge_choice = edge_choice;
  cfg.pair_probabilities = pairs;
  return cfg;
}

RepSeeds rep_seeds(std::uint64_t master, std::size_t rep) {
  const std::uint64_t key = rng::derive(master, {0x726570, rep});
  return {rng::derive(key, 1), rng::derive(key, 2), rng::derive(key, 3), rng::derive(key, 4)};
}

RepResult run_repetition(const Hypergraph& g, std::span<const double> tau_hat, Method method,
                         const ExperimentConfig& config, std::size_t rep, std::size_t workers) {
  if (tau_hat.size() != g.node_count()) throw Error(ErrorCode::InvalidArgument, "one ITE per node is required");
  const RepSeeds seeds = rep_seeds(config.seed, rep);
  const std::vector<double> weights = add_noise(tau_hat, config.noise, seeds.noise);
  const auto start = std::chrono::steady_clock::now();

  RepResult out;
  if (method == Method::Random) {
    out.trace = random_select(g, config.k, seeds.random);
  } else {
    const Objective objective = method == Method::CelfCount ? Objective::UnitCount : Objective::CausalITE;
    McOracle oracle(g, objective_weights(objective, weights), config.diffusion(seeds.selection),
                    config.select_rounds, workers);
    GreedyOptions options;
    options.stop_on_negative = config.stop_on_negative;
    out.trace = method == Method::CauimGreedy ? greedy_select(oracle, config.k, options)
                                              : celf_select(oracle, config.k, options);
  }
  for (const SpreadEstimate& e : evaluate_prefixes(g, weights, out.trace.seeds, config.diffusion(seeds.evaluation),
                                                   config.eval_rounds, workers)) {
    out.curve.push_back(e.mean);
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

namespace {

struct Task {
  std::size_t point;
  std::size_t method;
  std::size_t rep;
};

// Runs every (config, method, rep) triple on one pool and scatters results
// back into per-config runs.
std::vector<std::vector<MethodRun>> run_all(const Hypergraph& g, std::span<const double> tau_hat,
                                            std::span<const ExperimentConfig> configs, std::size_t workers) {
  std::vector<std::vector<MethodRun>> runs(configs.size());
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    configs[i].validate();
    for (std::size_t m = 0; m < configs[i].methods.size(); ++m) {
      MethodRun run;
      run.method = configs[i].methods[m];
      run.reps.resize(configs[i].reps);
      runs[i].push_back(std::move(run));
      for (std::size_t r = 0; r < configs[i].reps; ++r) tasks.push_back({i, m, r});
    }
  }
  parallel_for(tasks.size(), workers, [&](std::size_t t, std::size_t) {
    const Task& task = tasks[t];
    MethodRun& run = runs[task.point][task.method];
    run.reps[task.rep] = run_repetition(g, tau_hat, run.method, configs[task.point], task.rep, 1);
  });
  return runs;
}

}  // namespace

std::vector<MethodRun> run_experiment(const Hypergraph& g, std::span<const double> tau_hat,
                                      const ExperimentConfig& config) {
  return std::move(run_all(g, tau_hat, std::span(&config, 1), config.workers).front());
}

std::vector<ResultRow> summarize(const MethodRun& run) {
  std::size_t longest = 0;
  double seconds = 0.0;
  for (const RepResult& r : run.reps) {
    longest = std::max(longest, r.curve.size());
    seconds += r.seconds;
  }
  const double n = static_cast<double>(run.reps.size());
  std::vector<ResultRow> rows;
  for (std::size_t c = 0; c < longest; ++c) {
    // A repetition that stopped early keeps its last value for larger seed counts.
    std::vector<double> values;
    for (const RepResult& r : run.reps) {
      if (r.curve.empty()) values.push_back(0.0);
      else values.push_back(r.curve[std::min(c, r.curve.size() - 1)]);
    }
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    ResultRow row;
    row.method = run.method;
    row.seed_count = c + 1;
    row.mean = mean;
    row.stddev = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    row.reps = values.size();
    row.wall_seconds = n > 0 ? seconds / n : 0.0;
    rows.push_back(row);
  }
  return rows;
}

void write_results(std::ostream& out, std::span<const ResultRow> rows) {
  out << "# cauim-results v1\n";
  out << "method,seed_count,mean,std,reps\n";
  for (const ResultRow& r : rows) {
    out << to_string(r.method) << ',' << r.seed_count << ',' << io::format_double(r.mean) << ','
        << io::format_double(r.stddev) << ',' << r.reps << '\n';
  }
}

void write_traces(std::ostream& out, const Hypergraph& g, std::span<const MethodRun> runs) {
  out << "# cauim-trace v1\n";
  out << "method,";
  write_trace_header(out);
  for (const MethodRun& run : runs) {
    for (std::size_t r = 0; r < run.reps.size(); ++r) {
      std::ostringstream body;
      write_trace_rows(body, g, run.reps[r].trace, r);
      std::istringstream lines(body.str());
      for (std::string line; std::getline(lines, line);) out << to_string(run.method) << ',' << line << '\n';
    }
  }
}

void write_timing(std::ostream& out, std::span<const MethodRun> runs) {
  out << "# cauim-timing v1\n";
  out << "method,rep,seconds\n";
  for (const MethodRun& run : runs) {
    for (std::size_t r = 0; r < run.reps.size(); ++r) {
      out << to_string(run.method) << ',' << r << ',' << io::format_seconds(run.reps[r].seconds) << '\n';
    }
  }
}

std::string_view to_string(SweepParam param) {
  switch (param) {
    case SweepParam::Noise: return "noise";
    case SweepParam::P: return "p";
    case SweepParam::Iter: return "iter";
  }
  return "?";
}

SweepParam parse_sweep_param(std::string_view text) {
  for (SweepParam s : {SweepParam::Noise, SweepParam::P, SweepParam::Iter}) {
    if (text == to_string(s)) return s;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown sweep parameter '" + std::string(text) + "'");
}

std::vector<double> default_grid(SweepParam param) {
  switch (param) {
    case SweepParam::Noise: {
      std::vector<double> grid{0, 2, 4, 6, 8, 9};
      for (int s = 10; s <= 20; ++s) grid.push_back(s);
      return grid;
    }
    case SweepParam::P: return {0.005, 0.008, 0.009, 0.01, 0.011, 0.012, 0.015, 0.02};
    case SweepParam::Iter: return {25, 50, 100};
  }
  return {};
}

std::vector<SweepPoint> run_sweep(const Hypergraph& g, std::span<const double> tau_hat, const ExperimentConfig& base,
                                  SweepParam param, std::span<const double> grid) {
  if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "sweep grid is empty");
  std::vector<ExperimentConfig> configs;
  for (double value : grid) {
    ExperimentConfig c = base;
    switch (param) {
      case SweepParam::Noise: c.noise = value; break;
      case SweepParam::P: c.p = value; break;
      case SweepParam::Iter:
        if (!(value >= 1.0) || value != std::floor(value)) {
          throw Error(ErrorCode::InvalidArgument, "iter grid values must be positive integers");
        }
        c.select_rounds = c.eval_rounds = static_cast<std::size_t>(value);
        break;
    }
    configs.push_back(std::move(c));
  }
  auto runs = run_all(g, tau_hat, configs, base.workers);
  std::vector<SweepPoint> points(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    points[i].value = grid[i];
    points[i].runs = std::move(runs[i]);
    for (const MethodRun& run : points[i].runs) {
      for (const RepResult& r : run.reps) points[i].seconds += r.seconds;
    }
  }
  return points;
}

void write_sweep(std::ostream& out, SweepParam param, std::span<const SweepPoint> points) {
  out << "# cauim-sweep v1\n";
  out << "param,value,method,seed_count,mean,std,reps\n";
  for (const SweepPoint& point : points) {
    for (const MethodRun& run : point.runs) {
      for (const ResultRow& r : summarize(run)) {
        out << to_string(param) << ',' << io::format_double(point.value) << ',' << to_string(r.method) << ','
            << r.seed_count << ',' << io::format_double(r.mean) << ',' << io::format_double(r.stddev) << ','
            << r.reps << '\n';
      }
    }
  }
}

void write_sweep_timing(std::ostream& out, SweepParam param, std::span<const SweepPoint> points) {
  out << "# cauim-sweep-timing v1\n";
  out << "param,value,seconds\n";
  for (const SweepPoint& point : points) {
    out << to_string(param) << ',' << io::format_double(point.value) << ',' << io::format_seconds(point.seconds)
        << '\n';
  }
}

}  // namespace cauim::cli
