#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "cauim/diffusion.hpp"
#include "cauim/hypergraph.hpp"

namespace testing_support {

// Hypergraph from hyperedge member lists; nodes are numbered by first appearance.
inline cauim::Hypergraph graph_of(const std::vector<std::vector<std::string>>& edges) {
  std::ostringstream text;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    text << 'e' << e << '\t';
    for (std::size_t i = 0; i < edges[e].size(); ++i) text << (i ? "," : "") << edges[e][i];
    text << '\n';
  }
  std::istringstream in(text.str());
  return cauim::parse_hypergraph(in);
}

// The seven-book, four-author example: H1 = {V1,V2,V3}, H2 = {V3,V6},
// H3 = {V4,V5,V6}, H4 = {V6,V7}.
inline cauim::Hypergraph example_graph() {
  std::istringstream in(
      "H1\tV1,V2,V3\n"
      "H2\tV3,V6\n"
      "H3\tV4,V5,V6\n"
      "H4\tV6,V7\n");
  return cauim::parse_hypergraph(in);
}

inline cauim::DiffusionConfig config(cauim::DiffusionModel model, double p, std::uint32_t horizon,
                                     std::uint64_t seed = 7) {
  cauim::DiffusionConfig cfg;
  cfg.model = model;
  cfg.p = p;
  cfg.horizon = horizon;
  cfg.seed = seed;
  return cfg;
}

inline cauim::NodeId node(const cauim::Hypergraph& g, const std::string& label) {
  return *g.find_node(label);
}

}  // namespace testing_support
