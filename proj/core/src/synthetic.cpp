#include "fedhgn/synthetic.hpp"

#include <random>
#include <string>

#include "fedhgn/error.hpp"

namespace fedhgn {

Hypergraph make_community_hypergraph(const SyntheticSpec& spec) {
  if (spec.num_nodes == 0) throw Error(ErrorKind::EmptyGraph, "synthetic graph needs nodes");
  if (spec.num_classes == 0 || spec.min_edge_size == 0 || spec.min_edge_size > spec.max_edge_size) {
    throw Error(ErrorKind::InvalidArgument, "bad synthetic spec");
  }
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<std::size_t> pick_class(0, spec.num_classes - 1);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Hypergraph hg;
  hg.name = "synthetic-" + std::to_string(spec.num_nodes) + "x" + std::to_string(spec.num_classes);
  hg.num_nodes = spec.num_nodes;
  hg.num_classes = spec.num_classes;
  hg.labels.resize(spec.num_nodes);
  std::vector<std::vector<NodeId>> by_class(spec.num_classes);
  for (NodeId v = 0; v < spec.num_nodes; ++v) {
    const auto c = pick_class(rng);
    hg.labels[v] = static_cast<Label>(c);
    by_class[c].push_back(v);
  }

  Matrix prototypes(spec.num_classes, spec.feature_dim);
  for (double& p : prototypes.values()) p = spec.signal * gauss(rng);
  hg.features = Matrix(spec.num_nodes, spec.feature_dim);
  for (NodeId v = 0; v < spec.num_nodes; ++v) {
    auto proto = prototypes.row(static_cast<std::size_t>(hg.labels[v]));
    auto row = hg.features.row(v);
    for (std::size_t k = 0; k < spec.feature_dim; ++k) row[k] = proto[k] + spec.noise * gauss(rng);
  }

  std::uniform_int_distribution<std::size_t> pick_size(spec.min_edge_size, spec.max_edge_size);
  std::uniform_int_distribution<NodeId> pick_any(0, spec.num_nodes - 1);
  std::bernoulli_distribution same_class(spec.homophily);
  for (NodeId v = 0; v < spec.num_nodes; ++v) {
    const auto& own = by_class[static_cast<std::size_t>(hg.labels[v])];
    std::uniform_int_distribution<std::size_t> pick_own(0, own.size() - 1);
    std::vector<NodeId> members{v};
    const std::size_t size = pick_size(rng);
    for (std::size_t i = 1; i < size; ++i) members.push_back(same_class(rng) ? own[pick_own(rng)] : pick_any(rng));
    hg.hyperedges.push_back(std::move(members));
    hg.edge_weights.push_back(1.0);
  }
  merge_duplicate_edges(hg.hyperedges, hg.edge_weights);
  std::fill(hg.edge_weights.begin(), hg.edge_weights.end(), 1.0);
  return hg;
}

}  // namespace fedhgn
