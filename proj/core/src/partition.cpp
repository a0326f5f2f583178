#include "fedhgn/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "fedhgn/error.hpp"

namespace fedhgn {

namespace {

void check_spec(const PartitionSpec& spec) {
  if (spec.num_clients < 1) throw Error(ErrorKind::InvalidArgument, "num_clients must be >= 1");
  if (!(spec.beta > 0.0)) throw Error(ErrorKind::InvalidArgument, "beta must be > 0");
}

std::size_t ratio_count(double ratio, std::size_t n) {
  return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 1e-9));
}

}  // namespace

std::vector<std::size_t> mask_indices(const std::vector<bool>& mask) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> apportion(std::size_t total, const std::vector<double>& proportions) {
  const double sum = std::accumulate(proportions.begin(), proportions.end(), 0.0);
  std::vector<std::size_t> sizes(proportions.size(), 0);
  std::vector<double> remainder(proportions.size(), 0.0);
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < proportions.size(); ++k) {
    const double exact = static_cast<double>(total) * proportions[k] / sum;
    sizes[k] = static_cast<std::size_t>(std::floor(exact));
    remainder[k] = exact - static_cast<double>(sizes[k]);
    assigned += sizes[k];
  }
  std::vector<std::size_t> order(proportions.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < total; i = (i + 1) % order.size(), ++assigned) ++sizes[order[i]];
  // Floating error can overshoot by one in pathological inputs.
  while (assigned > total) {
    auto it = std::max_element(sizes.begin(), sizes.end());
    --*it;
    --assigned;
  }
  return sizes;
}

Assignment dirichlet_partition(const Hypergraph& hg, const PartitionSpec& spec) {
  check_spec(spec);
  if (!hg.fully_labeled()) throw Error(ErrorKind::NoLabels, "dirichlet partition needs a label on every node");
  Assignment assignment(hg.num_nodes, 0);
  if (spec.num_clients == 1) return assignment;

  std::mt19937_64 rng(spec.seed);
  std::gamma_distribution<double> gamma(spec.beta, 1.0);
  std::vector<std::vector<NodeId>> by_class(hg.num_classes);
  for (NodeId v = 0; v < hg.num_nodes; ++v) by_class[static_cast<std::size_t>(hg.labels[v])].push_back(v);

  std::vector<double> proportions(spec.num_clients);
  for (auto& members : by_class) {
    for (auto& p : proportions) p = gamma(rng);
    std::shuffle(members.begin(), members.end(), rng);
    const auto sizes = apportion(members.size(), proportions);
    std::size_t cursor = 0;
    for (ClientId k = 0; k < spec.num_clients; ++k) {
      for (std::size_t i = 0; i < sizes[k]; ++i) assignment[members[cursor++]] = k;
    }
  }
  return assignment;
}

Assignment uniform_partition(std::size_t num_nodes, const PartitionSpec& spec) {
  check_spec(spec);
  std::vector<NodeId> order(num_nodes);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(spec.seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto sizes = apportion(num_nodes, std::vector<double>(spec.num_clients, 1.0));
  Assignment assignment(num_nodes, 0);
  std::size_t cursor = 0;
  for (ClientId k = 0; k < spec.num_clients; ++k) {
    for (std::size_t i = 0; i < sizes[k]; ++i) assignment[order[cursor++]] = k;
  }
  return assignment;
}

PartitionResult split_subgraphs(const Hypergraph& hg, const Assignment& assignment, std::size_t num_clients) {
  if (assignment.size() != hg.num_nodes) {
    throw Error(ErrorKind::DimensionMismatch, "assignment covers " + std::to_string(assignment.size()) +
                                                  " of " + std::to_string(hg.num_nodes) + " nodes");
  }
  PartitionResult result;
  result.clients.resize(num_clients);
  std::vector<NodeId> local_id(hg.num_nodes, 0);
  for (NodeId v = 0; v < hg.num_nodes; ++v) {
    if (assignment[v] >= num_clients) {
      throw Error(ErrorKind::InvalidArgument, "node " + std::to_string(v) + " assigned to client " +
                                                  std::to_string(assignment[v]));
    }
    auto& ids = result.clients[assignment[v]].global_node_ids;
    local_id[v] = ids.size();
    ids.push_back(v);
  }

  for (ClientId k = 0; k < num_clients; ++k) {
    auto& sub = result.clients[k];
    sub.client_id = k;
    sub.local_features = gather_rows(hg.features, sub.global_node_ids);
    if (hg.has_labels()) {
      for (NodeId v : sub.global_node_ids) sub.local_labels.push_back(hg.labels[v]);
    }
    sub.node_degree_local.assign(sub.num_nodes(), 0.0);
  }

  std::vector<std::vector<NodeId>> per_client(num_clients);
  for (EdgeId e = 0; e < hg.num_edges(); ++e) {
    for (auto& p : per_client) p.clear();
    for (NodeId v : hg.hyperedges[e]) per_client[assignment[v]].push_back(local_id[v]);
    std::size_t touched = 0;
    for (const auto& p : per_client) touched += p.empty() ? 0 : 1;
    const double w = hg.edge_weights[e];

    BorderEntry* border = nullptr;
    if (touched > 1) {
      border = &result.border.entries[e];
      border->total_members = hg.hyperedges[e].size();
      border->weight = w;
    }
    for (ClientId k = 0; k < num_clients; ++k) {
      if (per_client[k].empty()) continue;
      auto& sub = result.clients[k];
      for (NodeId local : per_client[k]) sub.node_degree_local[local] += w;
      if (border != nullptr) {
        border->clients.push_back(k);
        border->member_counts.push_back(per_client[k].size());
        sub.border_edges.push_back({e, per_client[k], w});
      } else {
        sub.internal_edges.push_back({e, per_client[k], w});
      }
    }
  }

  for (auto& sub : result.clients) {
    std::vector<bool> on_border(sub.num_nodes(), false);
    for (const auto& be : sub.border_edges) {
      for (NodeId local : be.members) on_border[local] = true;
    }
    sub.border_nodes = mask_indices(on_border);
  }
  return result;
}

std::vector<LocalEdge> trim_border(const ClientSubgraph& sub) {
  // The local view already holds only this client's members.
  return sub.border_edges;
}

Hypergraph trimmed_local_hypergraph(const ClientSubgraph& sub, std::size_t num_classes) {
  std::vector<LocalEdge> edges = sub.internal_edges;
  auto trimmed = trim_border(sub);
  edges.insert(edges.end(), trimmed.begin(), trimmed.end());
  std::sort(edges.begin(), edges.end(), [](const LocalEdge& a, const LocalEdge& b) { return a.id < b.id; });

  Hypergraph hg;
  hg.name = "client-" + std::to_string(sub.client_id);
  hg.num_nodes = sub.num_nodes();
  hg.num_classes = num_classes;
  for (Label l : sub.local_labels)
    if (l >= 0) hg.num_classes = std::max(hg.num_classes, static_cast<std::size_t>(l) + 1);
  hg.features = sub.local_features;
  hg.labels = sub.local_labels;
  for (auto& e : edges) {
    hg.hyperedges.push_back(std::move(e.members));
    hg.edge_weights.push_back(e.weight);
  }
  return hg;
}

NodeMasks make_masks(const ClientSubgraph& sub, double train_ratio, double val_ratio, double test_ratio,
                     std::uint64_t seed) {
  if (train_ratio < 0.0 || val_ratio < 0.0 || test_ratio < 0.0 ||
      train_ratio + val_ratio + test_ratio > 1.0 + 1e-12) {
    throw Error(ErrorKind::RatioOverflow, "ratios " + std::to_string(train_ratio) + "/" +
                                              std::to_string(val_ratio) + "/" + std::to_string(test_ratio) +
                                              " must be non-negative and sum to at most 1");
  }
  const std::size_t n = sub.num_nodes();
  NodeMasks masks{std::vector<bool>(n, false), std::vector<bool>(n, false), std::vector<bool>(n, false)};
  if (n == 0) return masks;

  std::size_t n_train = std::max<std::size_t>(1, ratio_count(train_ratio, n));
  std::size_t n_val = std::min(ratio_count(val_ratio, n), n - n_train);
  std::size_t n_test = std::min(ratio_count(test_ratio, n), n - n_train - n_val);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < n_train; ++i) masks.train[order[cursor++]] = true;
  for (std::size_t i = 0; i < n_val; ++i) masks.val[order[cursor++]] = true;
  for (std::size_t i = 0; i < n_test; ++i) masks.test[order[cursor++]] = true;
  return masks;
}

}  // namespace fedhgn
