#include "cauim/cli/app.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cauim/bounds.hpp"
#include "cauim/causal.hpp"
#include "cauim/cli/experiment.hpp"
#include "cauim/cli/generate.hpp"
#include "cauim/error.hpp"
#include "cauim/hypergraph.hpp"
#include "cauim/io.hpp"
#include "cauim/rng.hpp"

namespace cauim::cli {

namespace {

namespace fs = std::filesystem;

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  for (std::string_view item : io::split(text, ',')) {
    item = io::trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(io::parse_double(item, 0));
    } catch (const Error&) {
      throw Error(ErrorCode::InvalidArgument, std::string("bad number '") + std::string(item) + "' in " + what);
    }
  }
  return out;
}

// Splices `--config FILE` into the argument list: file entries become
// `--key=value` right after the command name so later arguments override them.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  if (args.empty()) return args;
  std::vector<std::string> rest;
  std::optional<std::string> path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  std::vector<std::string> out{args[0]};
  if (path) {
    std::ifstream in = io::open_input(*path);
    for (const auto& [key, value] : io::parse_key_values(in)) {
      if (key == "config") throw Error(ErrorCode::InvalidArgument, "config files cannot include other config files");
      out.push_back("--" + key + "=" + value);
    }
  }
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

struct GenOptions {
  AuthorBookParams graph;
  std::string memberships = "0.6,0.3,0.1";
  std::size_t dim = 10;
  std::string propensity, baseline, effect, spillover;
  std::optional<double> baseline_intercept, effect_intercept, noise_scale;
  std::uint64_t seed = 1;
  std::string graph_out, attrs_out;
};

struct EstimateOptions {
  std::string graph, attrs, out;
  double lambda = 1.0;
  bool strict = false;
};

struct ExperimentOptions {
  std::string graph, ite, attrs, pairs;
  double lambda = 1.0;
  std::string methods = "cauim-celf";
  std::string model = "sicp";
  std::string edge_choice = "uniform";
  ExperimentConfig config;
  // select
  std::string results_out, trace_out, timing_out;
  // sweep
  std::string param, grid;
};

struct VerifyOptions {
  CampaignConfig campaign;
  bool tau_all_one = false;
  bool corollary = false;
  bool no_claims = false;
  double gamma = 0.01;
  std::string counterexample_dir, report_dir, instance;
};

void add_experiment_options(CLI::App* cmd, ExperimentOptions& o) {
  cmd->add_option("--graph", o.graph, "Hypergraph file")->required();
  cmd->add_option("--ite", o.ite, "ITE CSV (node,tau_hat)");
  cmd->add_option("--attrs", o.attrs, "Node attribute CSV; ITEs are estimated from it");
  cmd->add_option("--lambda", o.lambda, "Ridge penalty when estimating from --attrs")->capture_default_str();
  cmd->add_option("--pairs", o.pairs, "Per-pair probabilities CSV (u,v,p)");
  cmd->add_option("--method", o.methods, "Comma-separated: cauim-greedy, cauim-celf, celf-count, random")
      ->capture_default_str();
  cmd->add_option("--k", o.config.k, "Seed count K")->capture_default_str();
  cmd->add_option("--p", o.config.p, "Activation probability")->capture_default_str();
  cmd->add_option("--model", o.model, "gic or sicp")->capture_default_str();
  cmd->add_option("--horizon", o.config.horizon, "Diffusion horizon n")->capture_default_str();
  cmd->add_option("--edge-choice", o.edge_choice, "SICP hyperedge choice: uniform or size")->capture_default_str();
  cmd->add_option("--select-T", o.config.select_rounds, "MC rounds during selection")->capture_default_str();
  cmd->add_option("--eval-T", o.config.eval_rounds, "MC rounds during evaluation")->capture_default_str();
  cmd->add_option("--reps", o.config.reps, "Repetitions R")->capture_default_str();
  cmd->add_option("--seed", o.config.seed, "Master seed")->capture_default_str();
  cmd->add_option("--noise", o.config.noise, "Std of Gaussian noise added to the ITEs")->capture_default_str();
  cmd->add_flag("--stop-on-negative", o.config.stop_on_negative, "Stop when the best marginal gain is negative");
  cmd->add_option("--workers", o.config.workers, "Worker threads, 0 = all cores")->capture_default_str();
  cmd->add_option("--timing-out", o.timing_out, "Wall-time CSV");
}

struct Inputs {
  Hypergraph graph;
  std::vector<double> tau_hat;
};

Inputs load_inputs(ExperimentOptions& o, std::ostream& err) {
  if (o.ite.empty() == o.attrs.empty()) {
    throw Error(ErrorCode::InvalidArgument, "give exactly one of --ite and --attrs");
  }
  Inputs in;
  in.graph = load_hypergraph(o.graph);
  if (!o.ite.empty()) {
    in.tau_hat = load_ite(o.ite, in.graph);
  } else {
    const NodeCausalTable table = load_attributes(o.attrs, in.graph);
    IteEstimate est = estimate_ite(in.graph, observed(table), o.lambda);
    for (const std::string& w : est.warnings) err << "warning: " << w << '\n';
    in.tau_hat = std::move(est.tau_hat);
  }
  o.config.methods.clear();
  for (std::string_view m : io::split(o.methods, ',')) {
    m = io::trim(m);
    if (!m.empty()) o.config.methods.push_back(parse_method(m));
  }
  o.config.model = parse_model(o.model);
  o.config.edge_choice = parse_edge_choice(o.edge_choice);
  if (!o.pairs.empty()) {
    o.config.pairs = std::make_shared<PairProbabilities>(load_pair_probabilities(o.pairs, in.graph));
  }
  o.config.validate();
  return in;
}

int cmd_gen(GenOptions& o, std::ostream& out) {
  o.graph.memberships = parse_list(o.memberships, "--memberships");
  const Hypergraph g = generate_author_book(o.graph, o.seed);
  SimulationParams params = SimulationParams::defaults(o.dim);
  if (!o.propensity.empty()) params.propensity = parse_list(o.propensity, "--propensity");
  if (!o.baseline.empty()) params.baseline = parse_list(o.baseline, "--baseline");
  if (!o.effect.empty()) params.effect = parse_list(o.effect, "--effect");
  if (!o.spillover.empty()) params.spillover = parse_list(o.spillover, "--spillover");
  if (o.baseline_intercept) params.baseline_intercept = *o.baseline_intercept;
  if (o.effect_intercept) params.effect_intercept = *o.effect_intercept;
  if (o.noise_scale) params.noise_scale = *o.noise_scale;
  const NodeCausalTable table = simulate_outcomes(g, o.dim, params, rng::derive(o.seed, 0x6f7574636f6d65));
  save_hypergraph(o.graph_out, g);
  save_attributes(o.attrs_out, g, table);
  out << "nodes: " << g.node_count() << "\nhyperedges: " << g.edge_count() << "\nincidences: "
      << g.incidence_count() << '\n';
  return kExitOk;
}

int cmd_estimate(const EstimateOptions& o, std::ostream& out, std::ostream& err) {
  const Hypergraph g = load_hypergraph(o.graph);
  const NodeCausalTable table = load_attributes(o.attrs, g);
  const IteEstimate est = estimate_ite(g, observed(table), o.lambda, o.strict);
  for (const std::string& w : est.warnings) err << "warning: " << w << '\n';
  save_ite(o.out, g, est.tau_hat);
  out << "nodes: " << g.node_count() << "\npooled: " << (est.pooled ? "yes" : "no") << '\n';
  return kExitOk;
}

int cmd_select(ExperimentOptions& o, std::ostream& out, std::ostream& err) {
  const Inputs in = load_inputs(o, err);
  const std::vector<MethodRun> runs = run_experiment(in.graph, in.tau_hat, o.config);
  std::vector<ResultRow> rows;
  for (const MethodRun& run : runs) {
    const auto summary = summarize(run);
    rows.insert(rows.end(), summary.begin(), summary.end());
    if (!summary.empty()) {
      const ResultRow& last = summary.back();
      out << to_string(run.method) << ": K=" << last.seed_count << " mean=" << io::format_double(last.mean)
          << " std=" << io::format_double(last.stddev) << '\n';
    }
  }
  {
    std::ofstream f = io::open_output(o.results_out);
    write_results(f, rows);
  }
  if (!o.trace_out.empty()) {
    std::ofstream f = io::open_output(o.trace_out);
    write_traces(f, in.graph, runs);
  }
  if (!o.timing_out.empty()) {
    std::ofstream f = io::open_output(o.timing_out);
    write_timing(f, runs);
  }
  return kExitOk;
}

int cmd_sweep(ExperimentOptions& o, std::ostream& out, std::ostream& err) {
  const Inputs in = load_inputs(o, err);
  const SweepParam param = parse_sweep_param(o.param);
  const std::vector<double> grid = o.grid.empty() ? default_grid(param) : parse_list(o.grid, "--grid");
  const std::vector<SweepPoint> points = run_sweep(in.graph, in.tau_hat, o.config, param, grid);
  {
    std::ofstream f = io::open_output(o.results_out);
    write_sweep(f, param, points);
  }
  if (!o.timing_out.empty()) {
    std::ofstream f = io::open_output(o.timing_out);
    write_sweep_timing(f, param, points);
  }
  out << "grid points: " << points.size() << '\n';
  return kExitOk;
}

bool report_instance(std::ostream& out, const std::string& name, bool holds, double lhs, double rhs) {
  out << name << ": " << (holds ? "holds" : "VIOLATED") << " lhs=" << io::format_double(lhs)
      << " rhs=" << io::format_double(rhs) << '\n';
  return holds;
}

int verify_instance(const VerifyOptions& o, std::ostream& out) {
  const Instance inst = load_instance(o.instance);
  const BoundOptions& options = o.campaign.options;
  bool ok = true;
  const BoundReport b = verify_theorem1(inst, options);
  ok &= report_instance(out, "theorem1", b.holds, b.sigma_greedy, b.rhs);
  if (b.nonnegative) ok &= report_instance(out, "classic", b.holds_classic, b.sigma_greedy, b.rhs_classic);
  if (options.check_claims) out << "claims: " << (b.claims.all_hold() ? "hold" : "violated") << '\n';
  if (o.gamma > 0.0) {
    const RobustnessReport r = verify_theorem2(inst, o.gamma, {}, options);
    ok &= report_instance(out, "theorem2", r.holds, r.sigma_greedy, r.rhs);
  }
  if (o.corollary) {
    if (!inst.tau_true) throw Error(ErrorCode::InvalidArgument, "the corollary check needs tau_true in the instance");
    const RobustnessReport r = verify_corollary1(inst, {}, options);
    ok &= report_instance(out, "corollary1", r.holds, r.sigma_greedy, r.rhs);
  }
  return ok ? kExitOk : kExitVerifyFailed;
}

int cmd_verify(VerifyOptions& o, std::ostream& out) {
  o.campaign.options.check_claims = !o.no_claims;
  if (!(o.gamma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be >= 0");
  if (!o.instance.empty()) return verify_instance(o, out);

  struct Run {
    const char* name;
    CampaignCheck check;
  };
  std::vector<Run> checks{{"theorem1", CampaignCheck::Theorem1}};
  if (o.gamma > 0.0) checks.push_back({"theorem2", CampaignCheck::Theorem2});
  if (o.corollary) checks.push_back({"corollary1", CampaignCheck::Corollary1});

  o.campaign.spec.tau_mode = o.tau_all_one ? TauMode::Ones : TauMode::Mixed;
  o.campaign.gamma = o.gamma;
  bool ok = true;
  for (const Run& run : checks) {
    CampaignConfig config = o.campaign;
    config.check = run.check;
    if (!o.counterexample_dir.empty()) config.counterexample_dir = fs::path(o.counterexample_dir) / run.name;
    const CampaignResult result = run_campaign(config);
    out << "== " << run.name << '\n';
    write_campaign_summary(out, result);
    if (!o.report_dir.empty()) {
      fs::create_directories(o.report_dir);
      std::ofstream f = io::open_output(fs::path(o.report_dir) / (std::string(run.name) + ".csv"));
      write_campaign_csv(f, result);
    }
    ok &= result.failures() == 0;
  }
  return ok ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Causal influence maximization on hypergraphs", "cauim"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  const std::string config_help = "key = value file; command-line options override it";
  std::string unused_config;

  GenOptions gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Generate a synthetic author-book hypergraph with simulated outcomes");
  gen_cmd->add_option("--config", unused_config, config_help);
  gen_cmd->add_option("--nodes", gen.graph.nodes, "Books")->capture_default_str();
  gen_cmd->add_option("--edges", gen.graph.edges, "Authors")->capture_default_str();
  gen_cmd->add_option("--size-exponent", gen.graph.size_exponent, "Author popularity exponent")
      ->capture_default_str();
  gen_cmd->add_option("--size-offset", gen.graph.size_offset, "Author popularity rank offset")
      ->capture_default_str();
  gen_cmd->add_option("--memberships", gen.memberships, "Weights for 1, 2, 3, ... authors per book")
      ->capture_default_str();
  gen_cmd->add_option("--dim", gen.dim, "Covariate dimension")->capture_default_str();
  gen_cmd->add_option("--propensity", gen.propensity, "Comma-separated treatment coefficients");
  gen_cmd->add_option("--baseline", gen.baseline, "Comma-separated control-outcome coefficients");
  gen_cmd->add_option("--effect", gen.effect, "Comma-separated effect coefficients");
  gen_cmd->add_option("--spillover", gen.spillover, "Comma-separated neighbor-mean effect coefficients");
  gen_cmd->add_option("--baseline-intercept", gen.baseline_intercept, "Control-outcome intercept");
  gen_cmd->add_option("--effect-intercept", gen.effect_intercept, "Effect intercept");
  gen_cmd->add_option("--noise-scale", gen.noise_scale, "Outcome noise std");
  gen_cmd->add_option("--seed", gen.seed, "Master seed")->capture_default_str();
  gen_cmd->add_option("--graph-out", gen.graph_out, "Hypergraph file to write")->required();
  gen_cmd->add_option("--attrs-out", gen.attrs_out, "Node attribute CSV to write")->required();

  EstimateOptions est;
  CLI::App* est_cmd = app.add_subcommand("estimate", "Estimate ITEs from observational node data");
  est_cmd->add_option("--config", unused_config, config_help);
  est_cmd->add_option("--graph", est.graph, "Hypergraph file")->required();
  est_cmd->add_option("--attrs", est.attrs, "Node attribute CSV")->required();
  est_cmd->add_option("--lambda", est.lambda, "Ridge penalty")->capture_default_str();
  est_cmd->add_option("--out", est.out, "ITE CSV to write")->required();
  est_cmd->add_flag("--strict", est.strict, "Fail instead of pooling when an arm is too small");

  ExperimentOptions sel;
  CLI::App* sel_cmd = app.add_subcommand("select", "Select seeds and evaluate them over repetitions");
  sel_cmd->add_option("--config", unused_config, config_help);
  add_experiment_options(sel_cmd, sel);
  sel_cmd->add_option("--results-out", sel.results_out, "Per-seed-count result CSV")->required();
  sel_cmd->add_option("--trace-out", sel.trace_out, "Selection trace CSV");

  ExperimentOptions sweep;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Repeat the experiment over a parameter grid");
  sweep_cmd->add_option("--config", unused_config, config_help);
  add_experiment_options(sweep_cmd, sweep);
  sweep_cmd->add_option("--param", sweep.param, "noise, p or iter")->required();
  sweep_cmd->add_option("--grid", sweep.grid, "Comma-separated grid values (default per parameter)");
  sweep_cmd->add_option("--out", sweep.results_out, "Sweep CSV")->required();

  VerifyOptions ver;
  CLI::App* ver_cmd = app.add_subcommand("verify", "Check the approximation bounds on random tiny instances");
  ver_cmd->add_option("--config", unused_config, config_help);
  ver_cmd->add_option("--count", ver.campaign.count, "Instances per campaign")->capture_default_str();
  ver_cmd->add_option("--seed", ver.campaign.seed, "Campaign seed")->capture_default_str();
  ver_cmd->add_option("--gamma", ver.gamma, "Adversarial perturbation; 0 checks only the unperturbed bound")
      ->capture_default_str();
  ver_cmd->add_flag("--tau-all-one", ver.tau_all_one, "Unit weights: also certify the classic bound");
  ver_cmd->add_flag("--corollary", ver.corollary, "Also run the estimator-noise campaign");
  ver_cmd->add_flag("--no-claims", ver.no_claims, "Skip the per-step intermediate inequalities");
  ver_cmd->add_option("--max-nodes", ver.campaign.spec.max_nodes, "Largest instance")->capture_default_str();
  ver_cmd->add_option("--max-edges", ver.campaign.spec.max_edges, "Most hyperedges")->capture_default_str();
  ver_cmd->add_option("--max-edge-size", ver.campaign.spec.max_edge_size, "Largest hyperedge")
      ->capture_default_str();
  ver_cmd->add_option("--epsilon-cap", ver.campaign.options.epsilon_cap, "Largest |v1| searched for epsilon1");
  ver_cmd->add_option("--budget", ver.campaign.options.budget, "Enumeration budget per query")
      ->capture_default_str();
  ver_cmd->add_option("--workers", ver.campaign.workers, "Worker threads, 0 = all cores")->capture_default_str();
  ver_cmd->add_option("--counterexample-dir", ver.counterexample_dir, "Where shrunk counterexamples go");
  ver_cmd->add_option("--report-dir", ver.report_dir, "Where per-campaign CSV reports go");
  ver_cmd->add_option("--instance", ver.instance, "Check one saved instance directory instead of a campaign");

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen(gen, out);
    if (est_cmd->parsed()) return cmd_estimate(est, out, err);
    if (sel_cmd->parsed()) return cmd_select(sel, out, err);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep, out, err);
    if (ver_cmd->parsed()) return cmd_verify(ver, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return e.code() == ErrorCode::BudgetExceeded ? kExitBudget : kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace cauim::cli
