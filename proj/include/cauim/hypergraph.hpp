#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cauim {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

// Immutable undirected hypergraph with dense node and hyperedge ids.
//
// Members of each hyperedge are kept sorted, as are the hyperedges of each
// node (its star) and the deduplicated neighbor lists, so every traversal has
// a deterministic order. String labels from ingestion are retained for output.
class Hypergraph {
 public:
  Hypergraph() = default;

  // Validates and indexes `members`. Throws on empty hyperedges, duplicate
  // members and out-of-range ids. Missing labels default to decimal ids.
  Hypergraph(std::size_t node_count, std::vector<std::vector<NodeId>> members,
             std::vector<std::string> node_labels = {}, std::vector<std::string> edge_labels = {});

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t edge_count() const noexcept { return edge_offsets_.empty() ? 0 : edge_offsets_.size() - 1; }
  std::size_t incidence_count() const noexcept { return edge_members_.size(); }

  std::span<const NodeId> members(EdgeId e) const;
  std::span<const EdgeId> star(NodeId v) const;
  std::span<const NodeId> neighbors(NodeId v) const;

  std::size_t degree(NodeId v) const { return star(v).size(); }
  std::size_t edge_size(EdgeId e) const { return members(e).size(); }

  const std::string& node_label(NodeId v) const;
  const std::string& edge_label(EdgeId e) const;
  std::optional<NodeId> find_node(std::string_view label) const;

  // Full cross-scan of members against stars: v in members(e) <=> e in star(v).
  bool is_consistent() const;

 private:
  void check_node(NodeId v) const;

  std::size_t node_count_ = 0;
  std::vector<std::size_t> edge_offsets_;
  std::vector<NodeId> edge_members_;
  std::vector<std::size_t> star_offsets_;
  std::vector<EdgeId> star_edges_;
  std::vector<std::size_t> neighbor_offsets_;
  std::vector<NodeId> neighbor_nodes_;
  std::vector<std::string> node_labels_;
  std::vector<std::string> edge_labels_;
  std::unordered_map<std::string, NodeId> node_index_;
};

// Sorted neighbor set of v: union of v's hyperedges minus v itself.
std::vector<NodeId> neighbors(const Hypergraph& g, NodeId v);

// Bipartite node/hyperedge incidence graph. Left vertices are hypergraph
// nodes [0, node_count), right vertices are hyperedges [0, edge_count).
struct StarExpansion {
  std::size_t left_count = 0;
  std::size_t right_count = 0;
  std::vector<std::pair<NodeId, EdgeId>> edges;
};

StarExpansion star_expansion(const Hypergraph& g);

// Connected-component label for every hypergraph node in the star expansion.
// Labels are the smallest node id of the component.
std::vector<NodeId> node_components(const StarExpansion& bipartite);

// Text format: one hyperedge per line, `edge_label<TAB>node,node,...`.
// Lines starting with '#' are comments. The writer first declares every node
// in id order with the comment line `#@node<TAB>label`, so isolated nodes
// survive and ids round-trip; this loader understands the declarations and
// other readers skip them. Undeclared nodes get ids in order of appearance.
Hypergraph parse_hypergraph(std::istream& in);
Hypergraph load_hypergraph(const std::filesystem::path& path);
void write_hypergraph(std::ostream& out, const Hypergraph& g);
void save_hypergraph(const std::filesystem::path& path, const Hypergraph& g);

}  // namespace cauim
