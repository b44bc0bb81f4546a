#include "cauim/cli/generate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cauim/error.hpp"
#include "cauim/rng.hpp"

namespace cauim::cli {

namespace {

std::size_t draw_index(rng::Stream& s, const std::vector<double>& cumulative) {
  const double u = s.uniform() * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

std::vector<double> cumulate(std::vector<double> w) {
  std::partial_sum(w.begin(), w.end(), w.begin());
  return w;
}

}  // namespace

void AuthorBookParams::validate() const {
  if (nodes == 0) throw Error(ErrorCode::InvalidArgument, "nodes must be positive");
  if (edges == 0) throw Error(ErrorCode::InvalidArgument, "edges must be positive");
  if (!(size_exponent >= 0.0) || !std::isfinite(size_exponent)) {
    throw Error(ErrorCode::InvalidArgument, "size exponent must be a non-negative number");
  }
  if (!(size_offset > 0.0) || !std::isfinite(size_offset)) {
    throw Error(ErrorCode::InvalidArgument, "size offset must be positive");
  }
  if (memberships.empty()) throw Error(ErrorCode::InvalidArgument, "membership weights are empty");
  double total = 0.0;
  for (double w : memberships) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorCode::InvalidArgument, "membership weights must be >= 0");
    total += w;
  }
  if (total <= 0.0) throw Error(ErrorCode::InvalidArgument, "membership weights sum to zero");
  if (memberships.size() > edges) {
    // A book cannot join more distinct authors than exist.
    for (std::size_t i = edges; i < memberships.size(); ++i) {
      if (memberships[i] > 0.0) throw Error(ErrorCode::InvalidArgument, "more memberships per node than hyperedges");
    }
  }
}

Hypergraph generate_author_book(const AuthorBookParams& params, std::uint64_t seed) {
  params.validate();
  std::vector<double> popularity(params.edges);
  for (std::size_t e = 0; e < params.edges; ++e) {
    popularity[e] = std::pow(static_cast<double>(e) + params.size_offset, -params.size_exponent);
  }
  const std::vector<double> author_cdf = cumulate(popularity);
  const std::vector<double> count_cdf = cumulate(params.memberships);

  std::vector<std::vector<NodeId>> members(params.edges);
  std::vector<std::size_t> picked;
  for (NodeId v = 0; v < params.nodes; ++v) {
    rng::Stream s(rng::derive(seed, {0x626f6f6b, v}));
    const std::size_t count = draw_index(s, count_cdf) + 1;
    picked.clear();
    while (picked.size() < count) {
      const std::size_t e = draw_index(s, author_cdf);
      if (std::find(picked.begin(), picked.end(), e) == picked.end()) picked.push_back(e);
    }
    for (std::size_t e : picked) members[e].push_back(v);
  }
  for (std::size_t e = 0; e < params.edges; ++e) {
    if (!members[e].empty()) continue;
    rng::Stream s(rng::derive(seed, {0x617574686f72, e}));
    members[e].push_back(static_cast<NodeId>(s.below(params.nodes)));
  }

  std::vector<std::string> node_labels(params.nodes);
  for (std::size_t v = 0; v < params.nodes; ++v) node_labels[v] = "b" + std::to_string(v);
  std::vector<std::string> edge_labels(params.edges);
  for (std::size_t e = 0; e < params.edges; ++e) edge_labels[e] = "a" + std::to_string(e);
  return Hypergraph(params.nodes, std::move(members), std::move(node_labels), std::move(edge_labels));
}

}  // namespace cauim::cli
