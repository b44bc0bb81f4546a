#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cauim/hypergraph.hpp"

namespace cauim::cli {

// Synthetic author-book hypergraph: nodes are books, hyperedges are authors.
// Author e gets popularity (e + size_offset)^-size_exponent and every book
// picks its author count from `memberships` (weights for 1, 2, 3, ...)
// and then that many distinct authors by popularity. Authors left without a
// book receive one uniformly drawn book so no hyperedge is empty.
struct AuthorBookParams {
  std::size_t nodes = 4400;
  std::size_t edges = 120;
  double size_exponent = 1.0;
  double size_offset = 10.0;
  std::vector<double> memberships{0.6, 0.3, 0.1};

  void validate() const;
};

Hypergraph generate_author_book(const AuthorBookParams& params, std::uint64_t seed);

}  // namespace cauim::cli
