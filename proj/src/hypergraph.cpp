#include "cauim/hypergraph.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>

#include "cauim/error.hpp"
#include "cauim/io.hpp"

namespace cauim {

Hypergraph::Hypergraph(std::size_t node_count, std::vector<std::vector<NodeId>> members,
                       std::vector<std::string> node_labels, std::vector<std::string> edge_labels)
    : node_count_(node_count) {
  if (!node_labels.empty() && node_labels.size() != node_count) {
    throw Error(ErrorCode::InvalidArgument, "node label count does not match node count");
  }
  if (!edge_labels.empty() && edge_labels.size() != members.size()) {
    throw Error(ErrorCode::InvalidArgument, "edge label count does not match edge count");
  }

  edge_offsets_.reserve(members.size() + 1);
  edge_offsets_.push_back(0);
  std::vector<std::size_t> degree(node_count, 0);
  for (std::size_t e = 0; e < members.size(); ++e) {
    auto& m = members[e];
    if (m.empty()) {
      throw Error(ErrorCode::EmptyHyperedge, "hyperedge " + std::to_string(e) + " has no members");
    }
    std::sort(m.begin(), m.end());
    if (std::adjacent_find(m.begin(), m.end()) != m.end()) {
      throw Error(ErrorCode::DuplicateMember, "hyperedge " + std::to_string(e) + " repeats a member");
    }
    if (m.back() >= node_count) {
      throw Error(ErrorCode::OutOfRange, "hyperedge " + std::to_string(e) + " references node " +
                                             std::to_string(m.back()) + " >= " + std::to_string(node_count));
    }
    edge_members_.insert(edge_members_.end(), m.begin(), m.end());
    edge_offsets_.push_back(edge_members_.size());
    for (NodeId v : m) ++degree[v];
  }

  star_offsets_.assign(node_count + 1, 0);
  for (std::size_t v = 0; v < node_count; ++v) star_offsets_[v + 1] = star_offsets_[v] + degree[v];
  star_edges_.resize(edge_members_.size());
  std::vector<std::size_t> cursor(star_offsets_.begin(), star_offsets_.end() - 1);
  // Edges are visited in increasing id order, so every star comes out sorted.
  for (EdgeId e = 0; e + 1 < edge_offsets_.size(); ++e) {
    for (std::size_t k = edge_offsets_[e]; k < edge_offsets_[e + 1]; ++k) {
      star_edges_[cursor[edge_members_[k]]++] = e;
    }
  }

  neighbor_offsets_.assign(node_count + 1, 0);
  std::vector<NodeId> scratch;
  for (NodeId v = 0; v < node_count; ++v) {
    scratch.clear();
    for (std::size_t s = star_offsets_[v]; s < star_offsets_[v + 1]; ++s) {
      const EdgeId e = star_edges_[s];
      for (std::size_t k = edge_offsets_[e]; k < edge_offsets_[e + 1]; ++k) {
        if (edge_members_[k] != v) scratch.push_back(edge_members_[k]);
      }
    }
    std::sort(scratch.begin(), scratch.end());
    scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
    neighbor_nodes_.insert(neighbor_nodes_.end(), scratch.begin(), scratch.end());
    neighbor_offsets_[v + 1] = neighbor_nodes_.size();
  }

  if (node_labels.empty()) {
    node_labels.reserve(node_count);
    for (std::size_t v = 0; v < node_count; ++v) node_labels.push_back(std::to_string(v));
  }
  if (edge_labels.empty()) {
    edge_labels.reserve(members.size());
    for (std::size_t e = 0; e < members.size(); ++e) edge_labels.push_back("e" + std::to_string(e));
  }
  node_labels_ = std::move(node_labels);
  edge_labels_ = std::move(edge_labels);
  node_index_.reserve(node_count);
  for (NodeId v = 0; v < node_count; ++v) {
    if (!node_index_.emplace(node_labels_[v], v).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate node label '" + node_labels_[v] + "'");
    }
  }
}

void Hypergraph::check_node(NodeId v) const {
  if (v >= node_count_) {
    throw Error(ErrorCode::OutOfRange,
                "node " + std::to_string(v) + " out of range (node_count " + std::to_string(node_count_) + ")");
  }
}

std::span<const NodeId> Hypergraph::members(EdgeId e) const {
  if (e >= edge_count()) {
    throw Error(ErrorCode::OutOfRange, "hyperedge " + std::to_string(e) + " out of range");
  }
  return {edge_members_.data() + edge_offsets_[e], edge_offsets_[e + 1] - edge_offsets_[e]};
}

std::span<const EdgeId> Hypergraph::star(NodeId v) const {
  check_node(v);
  return {star_edges_.data() + star_offsets_[v], star_offsets_[v + 1] - star_offsets_[v]};
}

std::span<const NodeId> Hypergraph::neighbors(NodeId v) const {
  check_node(v);
  return {neighbor_nodes_.data() + neighbor_offsets_[v], neighbor_offsets_[v + 1] - neighbor_offsets_[v]};
}

const std::string& Hypergraph::node_label(NodeId v) const {
  check_node(v);
  return node_labels_[v];
}

const std::string& Hypergraph::edge_label(EdgeId e) const {
  if (e >= edge_count()) throw Error(ErrorCode::OutOfRange, "hyperedge " + std::to_string(e) + " out of range");
  return edge_labels_[e];
}

std::optional<NodeId> Hypergraph::find_node(std::string_view label) const {
  const auto it = node_index_.find(std::string(label));
  if (it == node_index_.end()) return std::nullopt;
  return it->second;
}

bool Hypergraph::is_consistent() const {
  for (EdgeId e = 0; e < edge_count(); ++e) {
    for (NodeId v : members(e)) {
      const auto s = star(v);
      if (!std::binary_search(s.begin(), s.end(), e)) return false;
    }
  }
  for (NodeId v = 0; v < node_count_; ++v) {
    for (EdgeId e : star(v)) {
      const auto m = members(e);
      if (!std::binary_search(m.begin(), m.end(), v)) return false;
    }
  }
  return true;
}

std::vector<NodeId> neighbors(const Hypergraph& g, NodeId v) {
  const auto n = g.neighbors(v);
  return {n.begin(), n.end()};
}

StarExpansion star_expansion(const Hypergraph& g) {
  StarExpansion out;
  out.left_count = g.node_count();
  out.right_count = g.edge_count();
  out.edges.reserve(g.incidence_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    for (NodeId v : g.members(e)) out.edges.emplace_back(v, e);
  }
  return out;
}

std::vector<NodeId> node_components(const StarExpansion& bipartite) {
  // Union-find over left ∪ right vertices; right vertex h is stored at left_count + h.
  const std::size_t total = bipartite.left_count + bipartite.right_count;
  std::vector<std::size_t> parent(total);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [v, h] : bipartite.edges) {
    std::size_t a = find(v);
    std::size_t b = find(bipartite.left_count + h);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    parent[b] = a;
  }
  std::vector<NodeId> label(bipartite.left_count);
  for (std::size_t v = 0; v < bipartite.left_count; ++v) label[v] = static_cast<NodeId>(find(v));
  return label;
}

namespace {

constexpr std::string_view kNodePragma = "#@node\t";

}  // namespace

Hypergraph parse_hypergraph(std::istream& in) {
  std::vector<std::string> node_labels;
  std::unordered_map<std::string, NodeId> node_ids;
  std::vector<std::string> edge_labels;
  std::unordered_map<std::string, std::size_t> edge_lines;
  std::vector<std::vector<NodeId>> members;

  auto intern = [&](std::string_view label) {
    auto [it, inserted] = node_ids.emplace(std::string(label), static_cast<NodeId>(node_labels.size()));
    if (inserted) node_labels.emplace_back(label);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.starts_with(kNodePragma)) {
      const std::string_view label = std::string_view(line).substr(kNodePragma.size());
      if (label.empty() || label.find(',') != std::string_view::npos) {
        throw ParseError(line_no, "malformed node declaration");
      }
      intern(label);
      continue;
    }
    if (line.front() == '#') continue;

    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(line_no, "expected '<edge label><TAB><node list>'");
    const std::string_view edge_label = std::string_view(line).substr(0, tab);
    const std::string_view node_list = std::string_view(line).substr(tab + 1);
    if (edge_label.empty()) throw ParseError(line_no, "empty hyperedge label");
    if (node_list.find('\t') != std::string_view::npos) throw ParseError(line_no, "unexpected second TAB");
    if (!edge_lines.emplace(std::string(edge_label), line_no).second) {
      throw ParseError(line_no, "duplicate hyperedge label '" + std::string(edge_label) + "'");
    }
    if (node_list.empty()) {
      throw ParseError(line_no, "hyperedge '" + std::string(edge_label) + "' has no members",
                       ErrorCode::EmptyHyperedge);
    }

    std::vector<NodeId> edge;
    for (std::string_view label : io::split(node_list, ',')) {
      if (label.empty()) throw ParseError(line_no, "empty node label");
      edge.push_back(intern(label));
    }
    std::vector<NodeId> sorted = edge;
    std::sort(sorted.begin(), sorted.end());
    if (const auto dup = std::adjacent_find(sorted.begin(), sorted.end()); dup != sorted.end()) {
      throw ParseError(line_no, "node '" + node_labels[*dup] + "' listed twice in hyperedge '" +
                                    std::string(edge_label) + "'",
                       ErrorCode::DuplicateMember);
    }
    edge_labels.emplace_back(edge_label);
    members.push_back(std::move(edge));
  }

  if (node_labels.empty()) throw Error(ErrorCode::EmptyGraph, "hypergraph input contains no nodes");
  const std::size_t n = node_labels.size();
  return Hypergraph(n, std::move(members), std::move(node_labels), std::move(edge_labels));
}

Hypergraph load_hypergraph(const std::filesystem::path& path) {
  auto in = io::open_input(path);
  return parse_hypergraph(in);
}

void write_hypergraph(std::ostream& out, const Hypergraph& g) {
  out << "# cauim-hypergraph v1\n";
  for (NodeId v = 0; v < g.node_count(); ++v) {
    out << kNodePragma << g.node_label(v) << '\n';
  }
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    out << g.edge_label(e) << '\t';
    bool first = true;
    for (NodeId v : g.members(e)) {
      if (!first) out << ',';
      out << g.node_label(v);
      first = false;
    }
    out << '\n';
  }
}

void save_hypergraph(const std::filesystem::path& path, const Hypergraph& g) {
  auto out = io::open_output(path);
  write_hypergraph(out, g);
  if (!out) throw Error(ErrorCode::Io, "failed writing '" + path.string() + "'");
}

}  // namespace cauim
