#include "cauim/causal.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string_view>

#include "cauim/error.hpp"
#include "cauim/io.hpp"
#include "cauim/rng.hpp"

namespace cauim {

namespace {

constexpr std::uint64_t kCovariateDomain = 1;
constexpr std::uint64_t kNoiseDomain = 2;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

void neighbor_mean(const Hypergraph& g, std::span<const double> x, std::size_t dim, NodeId v,
                   std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  const auto nbrs = g.neighbors(v);
  if (nbrs.empty()) return;
  for (NodeId u : nbrs) {
    for (std::size_t k = 0; k < dim; ++k) out[k] += x[u * dim + k];
  }
  for (double& value : out) value /= static_cast<double>(nbrs.size());
}

}  // namespace

ObservedData observed(const NodeCausalTable& table) {
  return ObservedData{table.dim, table.x, table.t, table.y_obs};
}

SimulationParams SimulationParams::defaults(std::size_t dim) {
  SimulationParams p;
  p.propensity.resize(dim);
  p.baseline.resize(dim);
  p.effect.resize(dim);
  // Outcomes are in units of 10 (think prices); noise_scale is in the same units.
  p.spillover.assign(dim, 3.0);
  for (std::size_t k = 0; k < dim; ++k) {
    const bool even = k % 2 == 0;
    p.propensity[k] = even ? 0.3 : -0.3;
    p.baseline[k] = even ? 10.0 : -5.0;
    p.effect[k] = even ? 6.0 : -4.0;
  }
  p.effect_intercept = 10.0;
  p.noise_scale = 10.0;
  return p;
}

void SimulationParams::validate(std::size_t dim) const {
  if (dim == 0) throw Error(ErrorCode::InvalidArgument, "covariate dimension must be at least 1");
  for (const auto* v : {&propensity, &baseline, &effect, &spillover}) {
    if (v->size() != dim) throw Error(ErrorCode::InvalidArgument, "simulation coefficient length must equal dim");
  }
  if (!(noise_scale >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise_scale must be non-negative");
}

NodeCausalTable simulate_outcomes(const Hypergraph& g, std::size_t dim, const SimulationParams& params,
                                  std::uint64_t seed) {
  params.validate(dim);
  const std::size_t n = g.node_count();
  NodeCausalTable table;
  table.dim = dim;
  table.x.resize(n * dim);
  table.t.resize(n);
  table.y_obs.resize(n);
  table.tau_hat.assign(n, 0.0);
  std::vector<double> tau(n);

  std::vector<double> treat_u(n);
  for (NodeId v = 0; v < n; ++v) {
    rng::Stream s(rng::derive(seed, {kCovariateDomain, v}));
    for (std::size_t k = 0; k < dim; ++k) table.x[v * dim + k] = s.normal();
    treat_u[v] = s.uniform();
  }

  std::vector<double> mean(dim);
  for (NodeId v = 0; v < n; ++v) {
    const auto xv = table.covariates(v);
    const double score = dot(params.propensity, xv);
    table.t[v] = treat_u[v] < 1.0 / (1.0 + std::exp(-score)) ? 1 : 0;
    neighbor_mean(g, table.x, dim, v, mean);
    tau[v] = params.effect_intercept + dot(params.effect, xv) + dot(params.spillover, mean);
    rng::Stream s(rng::derive(seed, {kNoiseDomain, v}));
    const double y0 = params.baseline_intercept + dot(params.baseline, xv) + params.noise_scale * s.normal();
    table.y_obs[v] = table.t[v] ? y0 + tau[v] : y0;
  }
  table.tau_true = std::move(tau);
  return table;
}

EnvironmentSummary environment_summary(const Hypergraph& g, const ObservedData& data) {
  const std::size_t n = g.node_count();
  if (data.size() != n) throw Error(ErrorCode::InvalidArgument, "causal table does not cover every node");
  EnvironmentSummary out;
  out.width = data.dim + 2;
  out.values.assign(n * out.width, 0.0);
  for (NodeId v = 0; v < n; ++v) {
    std::span<double> row(out.values.data() + v * out.width, out.width);
    neighbor_mean(g, data.x, data.dim, v, row.first(data.dim));
    const auto nbrs = g.neighbors(v);
    if (!nbrs.empty()) {
      std::size_t treated = 0;
      for (NodeId u : nbrs) treated += data.t[u];
      row[data.dim] = static_cast<double>(treated) / static_cast<double>(nbrs.size());
    }
    row[data.dim + 1] = static_cast<double>(g.degree(v));
  }
  return out;
}

namespace {

// Ridge solution of min |A b - y|^2 + lambda |b_{1:}|^2 (column 0 unpenalized),
// via the augmented least-squares system; the complete orthogonal
// decomposition returns the minimum-norm solution when A is rank deficient.
Eigen::VectorXd ridge(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, double lambda) {
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  if (lambda <= 0.0) return a.completeOrthogonalDecomposition().solve(y);
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(rows + cols - 1, cols);
  aug.topRows(rows) = a;
  const double s = std::sqrt(lambda);
  for (Eigen::Index k = 1; k < cols; ++k) aug(rows + k - 1, k) = s;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows + cols - 1);
  rhs.head(rows) = y;
  return aug.completeOrthogonalDecomposition().solve(rhs);
}

}  // namespace

IteEstimate estimate_ite(const Hypergraph& g, const ObservedData& data, double lambda, bool strict) {
  if (!(lambda >= 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be non-negative");
  const std::size_t n = g.node_count();
  const EnvironmentSummary env = environment_summary(g, data);
  const std::size_t cols = 1 + data.dim + env.width;

  Eigen::MatrixXd features(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols));
  for (NodeId v = 0; v < n; ++v) {
    const auto r = static_cast<Eigen::Index>(v);
    features(r, 0) = 1.0;
    const auto xv = data.covariates(v);
    for (std::size_t k = 0; k < data.dim; ++k) features(r, static_cast<Eigen::Index>(1 + k)) = xv[k];
    const auto ov = env.row(v);
    for (std::size_t k = 0; k < env.width; ++k) {
      features(r, static_cast<Eigen::Index>(1 + data.dim + k)) = ov[k];
    }
  }

  std::vector<Eigen::Index> arm[2];
  for (NodeId v = 0; v < n; ++v) arm[data.t[v] ? 1 : 0].push_back(static_cast<Eigen::Index>(v));

  IteEstimate out;
  out.tau_hat.assign(n, 0.0);
  const std::size_t need = cols;  // d + |o| + 1
  if (arm[0].size() < need || arm[1].size() < need) {
    const std::string msg = "treatment arm sizes (" + std::to_string(arm[1].size()) + " treated, " +
                            std::to_string(arm[0].size()) + " control) below " + std::to_string(need) +
                            "; using pooled model";
    if (strict) throw Error(ErrorCode::DegenerateArm, msg);
    out.pooled = true;
    out.warnings.push_back(msg);
    if (arm[0].empty() || arm[1].empty()) {
      out.warnings.push_back("one treatment arm is empty; effects are not identified and reported as 0");
      return out;
    }
    Eigen::MatrixXd pooled(features.rows(), features.cols() + 1);
    pooled.leftCols(features.cols()) = features;
    Eigen::VectorXd y(features.rows());
    for (NodeId v = 0; v < n; ++v) {
      pooled(static_cast<Eigen::Index>(v), features.cols()) = data.t[v];
      y(static_cast<Eigen::Index>(v)) = data.y_obs[v];
    }
    const Eigen::VectorXd beta = ridge(pooled, y, lambda);
    std::fill(out.tau_hat.begin(), out.tau_hat.end(), beta(features.cols()));
    return out;
  }

  Eigen::VectorXd beta[2];
  for (int a = 0; a < 2; ++a) {
    const auto& rows = arm[a];
    Eigen::MatrixXd fa(static_cast<Eigen::Index>(rows.size()), features.cols());
    Eigen::VectorXd ya(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      fa.row(static_cast<Eigen::Index>(i)) = features.row(rows[i]);
      ya(static_cast<Eigen::Index>(i)) = data.y_obs[static_cast<std::size_t>(rows[i])];
    }
    beta[a] = ridge(fa, ya, lambda);
  }
  const Eigen::VectorXd diff = features * (beta[1] - beta[0]);
  for (NodeId v = 0; v < n; ++v) out.tau_hat[v] = diff(static_cast<Eigen::Index>(v));
  return out;
}

std::vector<double> add_noise(std::span<const double> values, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise sigma must be non-negative");
  std::vector<double> out(values.begin(), values.end());
  if (sigma == 0.0) return out;
  for (NodeId v = 0; v < out.size(); ++v) {
    rng::Stream s(rng::derive(seed, v));
    out[v] += sigma * s.normal();
  }
  return out;
}

NodeCausalTable inject_noise(const NodeCausalTable& table, double sigma, std::uint64_t seed) {
  NodeCausalTable out = table;
  out.tau_hat = add_noise(table.tau_hat, sigma, seed);
  return out;
}

void write_attributes(std::ostream& out, const Hypergraph& g, const NodeCausalTable& table) {
  if (table.size() != g.node_count()) throw Error(ErrorCode::InvalidArgument, "causal table does not cover every node");
  out << "# cauim-attributes v1\n";
  out << "node,t,y";
  for (std::size_t k = 0; k < table.dim; ++k) out << ",x" << k;
  if (table.tau_true) out << ",tau_true";
  out << '\n';
  for (NodeId v = 0; v < table.size(); ++v) {
    out << g.node_label(v) << ',' << static_cast<int>(table.t[v]) << ',' << io::format_double(table.y_obs[v]);
    for (double value : table.covariates(v)) out << ',' << io::format_double(value);
    if (table.tau_true) out << ',' << io::format_double((*table.tau_true)[v]);
    out << '\n';
  }
}

namespace {

// Reads `node,...` CSV rows keyed by node label into per-node field lists.
// Calls row(v, fields, line) once per data row; checks that every node is covered.
template <class Row>
void read_node_rows(std::istream& in, const Hypergraph& g, std::size_t columns, Row&& row) {
  std::vector<bool> seen(g.node_count(), false);
  std::string line;
  std::size_t line_no = 0;
  bool header_done = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_done) {
      header_done = true;
      continue;
    }
    const auto fields = io::split(line, ',');
    if (fields.size() != columns) {
      throw ParseError(line_no, "expected " + std::to_string(columns) + " columns, got " + std::to_string(fields.size()));
    }
    const auto v = g.find_node(fields[0]);
    if (!v) throw ParseError(line_no, "unknown node '" + std::string(fields[0]) + "'", ErrorCode::OutOfRange);
    if (seen[*v]) throw ParseError(line_no, "node '" + std::string(fields[0]) + "' listed twice");
    seen[*v] = true;
    row(*v, fields, line_no);
  }
  const auto missing = std::find(seen.begin(), seen.end(), false);
  if (missing != seen.end()) {
    const auto v = static_cast<NodeId>(missing - seen.begin());
    throw Error(ErrorCode::ParseError, "no row for node '" + g.node_label(v) + "'");
  }
}

std::vector<std::string> read_header(std::istream& in) {
  const auto start = in.tellg();
  std::string line;
  while (true) {
    if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "missing CSV header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() != '#') break;
  }
  in.clear();
  in.seekg(start);
  std::vector<std::string> out;
  for (auto f : io::split(line, ',')) out.emplace_back(io::trim(f));
  return out;
}

}  // namespace

NodeCausalTable parse_attributes(std::istream& in, const Hypergraph& g) {
  const auto header = read_header(in);
  if (header.size() < 4 || header[0] != "node" || header[1] != "t" || header[2] != "y") {
    throw ParseError(1, "header must start with node,t,y,x0");
  }
  const bool has_truth = header.back() == "tau_true";
  const std::size_t dim = header.size() - 3 - (has_truth ? 1 : 0);
  if (dim == 0) throw ParseError(1, "no covariate columns");
  for (std::size_t k = 0; k < dim; ++k) {
    if (header[3 + k] != "x" + std::to_string(k)) throw ParseError(1, "expected column x" + std::to_string(k));
  }

  const std::size_t n = g.node_count();
  NodeCausalTable table;
  table.dim = dim;
  table.x.resize(n * dim);
  table.t.resize(n);
  table.y_obs.resize(n);
  table.tau_hat.assign(n, 0.0);
  std::vector<double> truth(has_truth ? n : 0);
  read_node_rows(in, g, header.size(), [&](NodeId v, const auto& fields, std::size_t line) {
    const long long t = io::parse_int(fields[1], line);
    if (t != 0 && t != 1) throw ParseError(line, "treatment must be 0 or 1");
    table.t[v] = static_cast<std::uint8_t>(t);
    table.y_obs[v] = io::parse_double(fields[2], line);
    for (std::size_t k = 0; k < dim; ++k) table.x[v * dim + k] = io::parse_double(fields[3 + k], line);
    if (has_truth) truth[v] = io::parse_double(fields[3 + dim], line);
  });
  if (has_truth) table.tau_true = std::move(truth);
  return table;
}

void save_attributes(const std::filesystem::path& path, const Hypergraph& g, const NodeCausalTable& table) {
  auto out = io::open_output(path);
  write_attributes(out, g, table);
}

NodeCausalTable load_attributes(const std::filesystem::path& path, const Hypergraph& g) {
  auto in = io::open_input(path);
  return parse_attributes(in, g);
}

void write_ite(std::ostream& out, const Hypergraph& g, std::span<const double> tau_hat) {
  if (tau_hat.size() != g.node_count()) throw Error(ErrorCode::InvalidArgument, "ITE vector does not cover every node");
  out << "# cauim-ite v1\n";
  out << "node,tau_hat\n";
  for (NodeId v = 0; v < tau_hat.size(); ++v) out << g.node_label(v) << ',' << io::format_double(tau_hat[v]) << '\n';
}

std::vector<double> parse_ite(std::istream& in, const Hypergraph& g) {
  const auto header = read_header(in);
  if (header.size() != 2 || header[0] != "node" || header[1] != "tau_hat") {
    throw ParseError(1, "header must be node,tau_hat");
  }
  std::vector<double> out(g.node_count(), 0.0);
  read_node_rows(in, g, 2, [&](NodeId v, const auto& fields, std::size_t line) {
    out[v] = io::parse_double(fields[1], line);
  });
  return out;
}

void save_ite(const std::filesystem::path& path, const Hypergraph& g, std::span<const double> tau_hat) {
  auto out = io::open_output(path);
  write_ite(out, g, tau_hat);
}

std::vector<double> load_ite(const std::filesystem::path& path, const Hypergraph& g) {
  auto in = io::open_input(path);
  return parse_ite(in, g);
}

}  // namespace cauim
