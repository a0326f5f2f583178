#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fedhgn/hypergraph.hpp"
#include "fedhgn/matrix.hpp"

namespace fedhgn {

// Rows are per-node embeddings x_v at some propagation layer.
using EmbeddingMatrix = Matrix;

struct PropagationConfig {
  std::size_t num_layers = 2;
};

// One hyperedge as seen by a node that aggregates over it.
struct IncidentEdge {
  double weight = 1.0;          // w(e)
  std::size_t degree = 1;       // s(e)
  std::span<const double> embedding;  // δ(e, ·)
};

// δ(e) = Σ_{u ∈ members} x_u / sqrt(d(u)). `members` index rows of `x` and
// entries of `node_degree`; zero-degree members contribute nothing. The sum is
// accumulated into `out` in member order.
void edge_gather_into(std::span<const NodeId> members, const Matrix& x, std::span<const double> node_degree,
                      std::span<double> out);
std::vector<double> edge_gather(std::span<const NodeId> members, const Matrix& x,
                                std::span<const double> node_degree);

// φ(v) = Σ_e w(e) / (s(e) sqrt(d(v))) · δ(e), accumulated into `out`.
// A node with d(v) = 0 receives nothing.
void node_aggregate_into(std::span<const IncidentEdge> edges, double node_degree, std::span<double> out);
std::vector<double> node_aggregate(std::span<const IncidentEdge> edges, double node_degree, std::size_t dim);

// x^(n+1) = φ(v, internal) + φ(v, border).
std::vector<double> propagate_combined(std::span<const double> local_phi, std::span<const double> border_phi);

// One application of D^{-1/2} H W S^{-1} Hᵀ D^{-1/2}, computed sparsely as
// edge gather followed by node aggregation in ascending id order.
Matrix propagate_step(const Hypergraph& hg, const IncidenceIndex& idx, const DegreeVectors& deg, const Matrix& x);

// N linear propagation steps with no activation in between.
Matrix propagate_global(const Hypergraph& hg, const Matrix& x, const PropagationConfig& cfg);

inline constexpr std::size_t kDenseReferenceMaxNodes = 1000;

// Materialises the dense operator and multiplies it out. Test oracle only.
Matrix dense_reference_propagate(const Hypergraph& hg, const Matrix& x, const PropagationConfig& cfg);

}  // namespace fedhgn
