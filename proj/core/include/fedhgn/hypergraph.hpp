#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fedhgn/matrix.hpp"

namespace fedhgn {

using NodeId = std::size_t;
using EdgeId = std::size_t;
using Label = std::int64_t;

inline constexpr Label kNoLabel = -1;

// Global hypergraph G = (V, E, W, X). A hyperedge is identified by its index
// into `hyperedges`; member lists are sorted ascending without repeats.
struct Hypergraph {
  std::string name;
  std::size_t num_nodes = 0;
  std::size_t num_classes = 0;
  Matrix features;                          // num_nodes x feature_dim
  std::vector<Label> labels;                // empty when the dataset has none; kNoLabel marks a gap
  std::vector<std::vector<NodeId>> hyperedges;
  std::vector<double> edge_weights;

  std::size_t feature_dim() const noexcept { return features.cols(); }
  std::size_t num_edges() const noexcept { return hyperedges.size(); }
  bool has_labels() const noexcept { return !labels.empty(); }
  bool fully_labeled() const noexcept;
};

struct IncidenceIndex {
  std::vector<std::vector<NodeId>> edge_to_nodes;
  std::vector<std::vector<EdgeId>> node_to_edges;
};

struct DegreeVectors {
  std::vector<double> node_degree;        // d(v) = sum of w(e) over incident edges
  std::vector<std::size_t> edge_degree;   // s(e) = member count
};

// Empty result means the hypergraph satisfies every structural invariant.
std::vector<std::string> validate(const Hypergraph& hg);

IncidenceIndex build_incidence(const Hypergraph& hg);
DegreeVectors compute_degrees(const Hypergraph& hg, const IncidenceIndex& idx);

// Merges hyperedges with identical member sets, keeping the first occurrence
// order and summing weights. Member lists are sorted and deduplicated first.
void merge_duplicate_edges(std::vector<std::vector<NodeId>>& hyperedges, std::vector<double>& weights);

// Builds one hyperedge {v} ∪ N(v) per node of a simple graph and removes
// duplicate member sets. All resulting weights are 1.
Hypergraph from_simple_graph(std::size_t num_nodes, const std::vector<std::pair<NodeId, NodeId>>& edges,
                             Matrix features, std::vector<Label> labels, std::size_t num_classes);

}  // namespace fedhgn
