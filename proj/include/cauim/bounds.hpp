#pragma once

// Numerical checks of the approximation and robustness guarantees on
// instances small enough for exact spread, exact reachability constants and
// a brute-force optimum.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cauim/diffusion.hpp"
#include "cauim/exact.hpp"
#include "cauim/hypergraph.hpp"

namespace cauim {

inline constexpr double kBoundTolerance = 1e-9;

struct Instance {
  Hypergraph graph;
  std::vector<double> tau_hat;
  std::optional<std::vector<double>> tau_true;
  DiffusionConfig cfg;
  std::size_t k = 1;
};

struct BoundOptions {
  // Largest |v1| searched for epsilon1; clamped to node_count - 1.
  std::size_t epsilon_cap = std::numeric_limits<std::size_t>::max();
  std::size_t budget = kDefaultEnumerationBudget;
  bool check_claims = true;
};

struct ClaimCheck {
  std::size_t step = 0;  // i, the greedy prefix size
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds() const { return lhs <= rhs + kBoundTolerance; }
};

struct ClaimsReport {
  std::vector<ClaimCheck> claim1;  // σ(S*) <= σ(S* ∪ S_i) + i ε2
  std::vector<ClaimCheck> claim2;  // σ(S* ∪ S_i) <= σ(S_{i+1}) - σ(S_i) + σ(S_i ∪ S*_{K-1}) + ε1 ε2
  std::vector<ClaimCheck> claim3;  // σ(S_i ∪ S*_{K-1}) <= (K-1)[σ(S_{i+1}) - σ(S_i)] + σ(S_i) + (K-1) ε1 ε2
  bool all_hold() const;
};

struct BoundReport {
  std::vector<NodeId> greedy_seeds;
  std::vector<NodeId> optimal_seeds;
  double sigma_greedy = 0.0;
  double sigma_opt = 0.0;
  double epsilon1 = 0.0;
  double epsilon2 = 0.0;
  std::size_t k = 0;
  double rhs = 0.0;
  double slack = 0.0;
  bool holds = false;
  // Classic (1 - 1/e) σ(S*) bound, evaluated when every weight is >= 0.
  bool nonnegative = false;
  double rhs_classic = 0.0;
  bool holds_classic = true;
  ClaimsReport claims;
};

struct RobustnessReport {
  double gamma = 0.0;
  double epsilon = 0.0;
  bool condition_ok = false;
  std::vector<NodeId> seeds;
  double perturbed_sigma = 0.0;  // the perturbed objective at the chosen set
  double sigma_greedy = 0.0;     // exact σ at the chosen set
  double sigma_opt = 0.0;
  double epsilon1 = 0.0;
  double epsilon2 = 0.0;
  std::size_t k = 0;
  double rhs = 0.0;
  double slack = 0.0;
  bool holds = false;
  // Corollary path only.
  double delta = 0.0;
  std::size_t excluded_sets = 0;  // sets with |σ(S)| < 1e-12 left out of the γ maximum
  bool premise_ok = true;         // σ̂(S)/σ(S) ∈ [1-γ, 1+γ] on every non-excluded set
};

// (1 - 1/e)(σ* - K ε1 ε2) - ε2 e^{1/K - 1}
double theorem1_rhs(double sigma_opt, std::size_t k, double epsilon1, double epsilon2);
// (1 - 1/e - ε)(σ* - K ε1 ε2) - ε2 e^{1/K - 1}
double theorem2_rhs(double sigma_opt, std::size_t k, double epsilon1, double epsilon2, double epsilon);
// Largest admissible γ for a given ε: (ε/k) / (2 + ε/k).
double gamma_limit(double epsilon, std::size_t k);
// Smallest ε admitting γ: the inverse of gamma_limit, 2γk / (1 - γ), rounded up
// to the first double that passes gamma_condition_ok. Infinite for γ >= 1.
double epsilon_for_gamma(double gamma, std::size_t k);
bool gamma_condition_ok(double gamma, double epsilon, std::size_t k);

BoundReport verify_theorem1(const Instance& instance, const BoundOptions& options = {});

// Greedy on an adversarial σ̂ with σ̂(S)/σ(S) ∈ [1-γ, 1+γ]: at every step the
// truly best extension is scaled down by γ and every other extension up by γ.
// With no epsilon given the smallest admissible one is used. For γ >= 1 the
// bound is vacuous (rhs = -inf) and condition_ok is false.
RobustnessReport verify_theorem2(const Instance& instance, double gamma, std::optional<double> epsilon = {},
                                 const BoundOptions& options = {});

// σ is the exact spread under tau_true, σ̂ the exact spread under tau_hat.
// δ = max |tau_hat - tau_true| (or the given delta if larger), γ = δ max_S |σ_naive(S) / σ(S)| over
// 1 <= |S| <= K. Greedy runs on σ̂ and is judged under σ.
RobustnessReport verify_corollary1(const Instance& instance, std::optional<double> delta = {},
                                   const BoundOptions& options = {});

// Largest value of |[σ(S∪v) - σ(S)] - [σ(T∪v) - σ(T)]| - ε1 ε2 over all S ⊂ T
// with |T| = |S| + 1 <= max_size and v outside T; <= 0 means the bounded
// increment property holds on those pairs.
double bounded_increment_excess(const Instance& instance, double epsilon1, double epsilon2, std::size_t max_size,
                                std::size_t budget = kDefaultEnumerationBudget);

// Random tiny instances.
enum class TauMode { Mixed, Ones, Nonnegative };

struct InstanceSpec {
  std::size_t min_nodes = 3;
  std::size_t max_nodes = 10;
  std::size_t max_edges = 6;
  std::size_t max_edge_size = 4;
  std::vector<double> p_values{0.2, 0.5, 0.8};
  std::vector<DiffusionModel> models{DiffusionModel::GIC, DiffusionModel::SICP};
  std::vector<std::uint32_t> horizons{1, 2, 3};
  std::vector<std::size_t> k_values{1, 2, 3};
  TauMode tau_mode = TauMode::Mixed;
  double tau_range = 2.0;  // Mixed: U[-r, r]; Nonnegative: U[0, r]
};

Instance random_instance(const InstanceSpec& spec, std::uint64_t seed);

// tau_true from simulate_outcomes and tau_hat from estimate_ite, both computed
// on the instance graph plus `extra_nodes` disjoint filler nodes so that the
// regression has enough samples; only the instance nodes are kept.
Instance random_causal_instance(const InstanceSpec& spec, std::uint64_t seed, std::size_t extra_nodes = 400);

// Instance directory: graph.txt, weights.csv (node,tau_hat[,tau_true]) and instance.cfg.
void save_instance(const std::filesystem::path& dir, const Instance& instance);
Instance load_instance(const std::filesystem::path& dir);

// Greedy structural shrinking: repeatedly drops nodes, hyperedges and members,
// lowers K and the horizon, and simplifies weights while `fails` stays true.
// Exceptions from `fails` count as "does not fail".
Instance shrink_instance(Instance instance, const std::function<bool(const Instance&)>& fails);

enum class CampaignCheck { Theorem1, Theorem2, Corollary1 };

struct CampaignConfig {
  std::size_t count = 200;
  std::uint64_t seed = 1;
  InstanceSpec spec;
  CampaignCheck check = CampaignCheck::Theorem1;
  double gamma = 0.01;
  BoundOptions options;
  // Where shrunk counterexamples are written; empty disables filing.
  std::filesystem::path counterexample_dir;
  std::size_t workers = 1;
};

struct CampaignRow {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  DiffusionModel model = DiffusionModel::GIC;
  double p = 0.0;
  std::uint32_t horizon = 0;
  std::size_t k = 0;
  bool skipped = false;  // enumeration budget exceeded
  std::string error;
  std::optional<BoundReport> bound;
  std::optional<RobustnessReport> robust;
  bool holds() const;
};

struct CampaignResult {
  std::vector<CampaignRow> rows;
  std::vector<std::filesystem::path> counterexamples;
  std::size_t failures() const;
  std::size_t skipped() const;
};

CampaignResult run_campaign(const CampaignConfig& config);

void write_campaign_csv(std::ostream& out, const CampaignResult& result);
void write_campaign_summary(std::ostream& out, const CampaignResult& result);

}  // namespace cauim
