#pragma once

#include <cstddef>
#include <cstdint>

#include "fedhgn/hypergraph.hpp"

namespace fedhgn {

// Community-structured hypergraph with noisy class-prototype features. Each
// node seeds one hyperedge of itself plus neighbours drawn from its own class
// with probability `homophily` (otherwise from anywhere); duplicates merge.
struct SyntheticSpec {
  std::size_t num_nodes = 1000;
  std::size_t num_classes = 4;
  std::size_t feature_dim = 64;
  std::size_t min_edge_size = 3;
  std::size_t max_edge_size = 8;
  double homophily = 0.85;
  double signal = 1.0;  // prototype entries are N(0, signal²)
  double noise = 6.0;   // per-node N(0, noise²) added to the prototype
  std::uint64_t seed = 1;
};

Hypergraph make_community_hypergraph(const SyntheticSpec& spec);

}  // namespace fedhgn
