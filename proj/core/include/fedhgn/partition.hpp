#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "fedhgn/hypergraph.hpp"
#include "fedhgn/matrix.hpp"

namespace fedhgn {

using ClientId = std::size_t;

struct PartitionSpec {
  std::size_t num_clients = 3;
  double beta = 10000.0;  // Dirichlet concentration
  std::uint64_t seed = 0;
};

// assignment[v] is the client that owns node v.
using Assignment = std::vector<ClientId>;

// A hyperedge restricted to one client's nodes. Members are local ids
// (indices into ClientSubgraph::global_node_ids), ascending.
struct LocalEdge {
  EdgeId id = 0;
  std::vector<NodeId> members;
  double weight = 1.0;
};

struct NodeMasks {
  std::vector<bool> train;
  std::vector<bool> val;
  std::vector<bool> test;
};

std::vector<std::size_t> mask_indices(const std::vector<bool>& mask);

struct ClientSubgraph {
  ClientId client_id = 0;
  std::vector<NodeId> global_node_ids;   // V_i, ascending
  Matrix local_features;
  std::vector<Label> local_labels;
  std::vector<LocalEdge> internal_edges;  // E_i, ascending by id
  std::vector<LocalEdge> border_edges;    // local view of E_i*, ascending by id
  std::vector<NodeId> border_nodes;       // V_i*, local ids
  // d(v) over E_i ∪ E_i*. Trimming never drops v from its own edges, so this
  // is also the node degree under the trimmed policy.
  std::vector<double> node_degree_local;
  NodeMasks masks;

  std::size_t num_nodes() const noexcept { return global_node_ids.size(); }
};

struct BorderEntry {
  std::vector<ClientId> clients;            // ascending
  std::vector<std::size_t> member_counts;   // parallel to clients
  std::size_t total_members = 0;            // s(e*)
  double weight = 1.0;                      // w(e*)
};

struct BorderIndex {
  std::map<EdgeId, BorderEntry> entries;

  std::size_t size() const noexcept { return entries.size(); }
  bool empty() const noexcept { return entries.empty(); }
};

struct PartitionResult {
  std::vector<ClientSubgraph> clients;
  BorderIndex border;
};

// Label-driven split: per class, proportions ~ Dirichlet(beta * 1_K), the
// shuffled class members are cut into contiguous blocks apportioned by largest
// remainder. Throws NoLabels if any node is unlabeled.
Assignment dirichlet_partition(const Hypergraph& hg, const PartitionSpec& spec);

// Label-agnostic fallback: shuffled nodes dealt into K near-equal blocks.
Assignment uniform_partition(std::size_t num_nodes, const PartitionSpec& spec);

// Largest-remainder rounding of `total` items over `proportions`.
std::vector<std::size_t> apportion(std::size_t total, const std::vector<double>& proportions);

PartitionResult split_subgraphs(const Hypergraph& hg, const Assignment& assignment, std::size_t num_clients);

// Border edges cut down to local members; s(ẽ) becomes the local member count.
std::vector<LocalEdge> trim_border(const ClientSubgraph& sub);

// The standalone hypergraph E_i ∪ Ẽ_i* over the client's local ids, with
// edges in ascending global id order.
Hypergraph trimmed_local_hypergraph(const ClientSubgraph& sub, std::size_t num_classes = 0);

NodeMasks make_masks(const ClientSubgraph& sub, double train_ratio, double val_ratio, double test_ratio,
                     std::uint64_t seed);

}  // namespace fedhgn
