#include "fedhgn/hypergraph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "fedhgn/error.hpp"

namespace fedhgn {

bool Hypergraph::fully_labeled() const noexcept {
  return labels.size() == num_nodes &&
         std::none_of(labels.begin(), labels.end(), [](Label l) { return l == kNoLabel; });
}

std::vector<std::string> validate(const Hypergraph& hg) {
  std::vector<std::string> report;
  if (hg.features.rows() != hg.num_nodes) {
    report.push_back("features has " + std::to_string(hg.features.rows()) + " rows, expected " +
                     std::to_string(hg.num_nodes));
  }
  if (!hg.features.all_finite()) report.push_back("features contain non-finite values");
  if (hg.edge_weights.size() != hg.hyperedges.size()) {
    report.push_back("edge_weights has length " + std::to_string(hg.edge_weights.size()) + ", expected " +
                     std::to_string(hg.hyperedges.size()));
  }
  for (std::size_t e = 0; e < hg.edge_weights.size(); ++e) {
    if (!(hg.edge_weights[e] > 0.0) || !std::isfinite(hg.edge_weights[e])) {
      report.push_back("hyperedge " + std::to_string(e) + " has non-positive weight " +
                       std::to_string(hg.edge_weights[e]));
    }
  }
  for (std::size_t e = 0; e < hg.hyperedges.size(); ++e) {
    const auto& members = hg.hyperedges[e];
    if (members.empty()) {
      report.push_back("hyperedge " + std::to_string(e) + " is empty");
      continue;
    }
    for (NodeId v : members) {
      if (v >= hg.num_nodes) {
        report.push_back("hyperedge " + std::to_string(e) + " has out-of-range node " + std::to_string(v));
        break;
      }
    }
    for (std::size_t i = 1; i < members.size(); ++i) {
      if (members[i - 1] == members[i]) {
        report.push_back("hyperedge " + std::to_string(e) + " has duplicate member " + std::to_string(members[i]));
        break;
      }
      if (members[i - 1] > members[i]) {
        report.push_back("hyperedge " + std::to_string(e) + " members are not sorted");
        break;
      }
    }
  }
  if (!hg.labels.empty()) {
    if (hg.labels.size() != hg.num_nodes) {
      report.push_back("labels has length " + std::to_string(hg.labels.size()) + ", expected " +
                       std::to_string(hg.num_nodes));
    }
    for (std::size_t v = 0; v < hg.labels.size(); ++v) {
      const Label l = hg.labels[v];
      if (l != kNoLabel && (l < 0 || static_cast<std::size_t>(l) >= hg.num_classes)) {
        report.push_back("node " + std::to_string(v) + " has label " + std::to_string(l) + " outside [0, " +
                         std::to_string(hg.num_classes) + ")");
        break;
      }
    }
  }
  return report;
}

IncidenceIndex build_incidence(const Hypergraph& hg) {
  IncidenceIndex idx;
  idx.edge_to_nodes = hg.hyperedges;
  idx.node_to_edges.resize(hg.num_nodes);
  // Edges are visited in ascending id, so each node list comes out sorted.
  for (EdgeId e = 0; e < hg.hyperedges.size(); ++e) {
    for (NodeId v : hg.hyperedges[e]) idx.node_to_edges[v].push_back(e);
  }
  return idx;
}

DegreeVectors compute_degrees(const Hypergraph& hg, const IncidenceIndex& idx) {
  DegreeVectors deg;
  deg.node_degree.assign(idx.node_to_edges.size(), 0.0);
  for (NodeId v = 0; v < idx.node_to_edges.size(); ++v) {
    for (EdgeId e : idx.node_to_edges[v]) deg.node_degree[v] += hg.edge_weights[e];
  }
  deg.edge_degree.reserve(idx.edge_to_nodes.size());
  for (const auto& members : idx.edge_to_nodes) deg.edge_degree.push_back(members.size());
  return deg;
}

void merge_duplicate_edges(std::vector<std::vector<NodeId>>& hyperedges, std::vector<double>& weights) {
  std::map<std::vector<NodeId>, std::size_t> seen;
  std::vector<std::vector<NodeId>> merged;
  std::vector<double> merged_weights;
  for (std::size_t e = 0; e < hyperedges.size(); ++e) {
    auto members = std::move(hyperedges[e]);
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    const double w = e < weights.size() ? weights[e] : 1.0;
    auto [it, inserted] = seen.try_emplace(members, merged.size());
    if (inserted) {
      merged.push_back(std::move(members));
      merged_weights.push_back(w);
    } else {
      merged_weights[it->second] += w;
    }
  }
  hyperedges = std::move(merged);
  weights = std::move(merged_weights);
}

Hypergraph from_simple_graph(std::size_t num_nodes, const std::vector<std::pair<NodeId, NodeId>>& edges,
                             Matrix features, std::vector<Label> labels, std::size_t num_classes) {
  if (num_nodes == 0) throw Error(ErrorKind::EmptyGraph, "simple graph has no nodes");
  std::vector<std::vector<NodeId>> neighbourhood(num_nodes);
  for (NodeId v = 0; v < num_nodes; ++v) neighbourhood[v].push_back(v);
  for (auto [u, v] : edges) {
    if (u >= num_nodes || v >= num_nodes) {
      throw Error(ErrorKind::ValidationError, "edge (" + std::to_string(u) + ", " + std::to_string(v) +
                                                  ") references a node >= " + std::to_string(num_nodes));
    }
    neighbourhood[u].push_back(v);
    neighbourhood[v].push_back(u);
  }

  Hypergraph hg;
  hg.num_nodes = num_nodes;
  hg.num_classes = num_classes;
  hg.features = std::move(features);
  hg.labels = std::move(labels);
  hg.hyperedges = std::move(neighbourhood);
  hg.edge_weights.assign(hg.hyperedges.size(), 1.0);
  merge_duplicate_edges(hg.hyperedges, hg.edge_weights);
  std::fill(hg.edge_weights.begin(), hg.edge_weights.end(), 1.0);
  return hg;
}

}  // namespace fedhgn
