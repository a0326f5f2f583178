#include "fedhgn/propagation.hpp"

#include <cmath>
#include <string>

#include "fedhgn/error.hpp"

namespace fedhgn {

namespace {

void check_config(const PropagationConfig& cfg) {
  if (cfg.num_layers < 1) throw Error(ErrorKind::InvalidArgument, "num_layers must be >= 1");
}

void check_rows(const Hypergraph& hg, const Matrix& x) {
  if (x.rows() != hg.num_nodes) {
    throw Error(ErrorKind::DimensionMismatch, "embedding has " + std::to_string(x.rows()) +
                                                  " rows, hypergraph has " + std::to_string(hg.num_nodes) +
                                                  " nodes");
  }
}

}  // namespace

void edge_gather_into(std::span<const NodeId> members, const Matrix& x, std::span<const double> node_degree,
                      std::span<double> out) {
  for (NodeId u : members) {
    const double d = node_degree[u];
    if (d <= 0.0) continue;
    const double scale = 1.0 / std::sqrt(d);
    auto xu = x.row(u);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += scale * xu[k];
  }
}

std::vector<double> edge_gather(std::span<const NodeId> members, const Matrix& x,
                                std::span<const double> node_degree) {
  std::vector<double> out(x.cols(), 0.0);
  edge_gather_into(members, x, node_degree, out);
  return out;
}

void node_aggregate_into(std::span<const IncidentEdge> edges, double node_degree, std::span<double> out) {
  if (node_degree <= 0.0) return;
  const double root = std::sqrt(node_degree);
  for (const auto& e : edges) {
    const double coeff = e.weight / (static_cast<double>(e.degree) * root);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += coeff * e.embedding[k];
  }
}

std::vector<double> node_aggregate(std::span<const IncidentEdge> edges, double node_degree, std::size_t dim) {
  std::vector<double> out(dim, 0.0);
  node_aggregate_into(edges, node_degree, out);
  return out;
}

std::vector<double> propagate_combined(std::span<const double> local_phi, std::span<const double> border_phi) {
  if (local_phi.size() != border_phi.size()) {
    throw Error(ErrorKind::DimensionMismatch, "cannot combine embeddings of dim " +
                                                  std::to_string(local_phi.size()) + " and " +
                                                  std::to_string(border_phi.size()));
  }
  std::vector<double> out(local_phi.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = local_phi[k] + border_phi[k];
  return out;
}

Matrix propagate_step(const Hypergraph& hg, const IncidenceIndex& idx, const DegreeVectors& deg, const Matrix& x) {
  check_rows(hg, x);
  Matrix edge_emb(hg.num_edges(), x.cols());
  for (EdgeId e = 0; e < hg.num_edges(); ++e) {
    edge_gather_into(idx.edge_to_nodes[e], x, deg.node_degree, edge_emb.row(e));
  }
  Matrix out(hg.num_nodes, x.cols());
  std::vector<IncidentEdge> incident;
  for (NodeId v = 0; v < hg.num_nodes; ++v) {
    incident.clear();
    for (EdgeId e : idx.node_to_edges[v]) {
      incident.push_back({hg.edge_weights[e], deg.edge_degree[e], edge_emb.row(e)});
    }
    node_aggregate_into(incident, deg.node_degree[v], out.row(v));
  }
  return out;
}

Matrix propagate_global(const Hypergraph& hg, const Matrix& x, const PropagationConfig& cfg) {
  check_config(cfg);
  check_rows(hg, x);
  const auto idx = build_incidence(hg);
  const auto deg = compute_degrees(hg, idx);
  Matrix cur = x;
  for (std::size_t n = 0; n < cfg.num_layers; ++n) cur = propagate_step(hg, idx, deg, cur);
  return cur;
}

Matrix dense_reference_propagate(const Hypergraph& hg, const Matrix& x, const PropagationConfig& cfg) {
  check_config(cfg);
  if (hg.num_nodes > kDenseReferenceMaxNodes) {
    throw Error(ErrorKind::TooLarge, std::to_string(hg.num_nodes) + " nodes exceeds dense guard of " +
                                         std::to_string(kDenseReferenceMaxNodes));
  }
  check_rows(hg, x);
  const std::size_t n = hg.num_nodes;
  const std::size_t m = hg.num_edges();

  Matrix h(n, m);
  for (std::size_t e = 0; e < m; ++e) {
    for (NodeId v : hg.hyperedges[e]) h(v, e) = 1.0;
  }
  std::vector<double> d_inv_sqrt(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    double d = 0.0;
    for (std::size_t e = 0; e < m; ++e) d += hg.edge_weights[e] * h(v, e);
    d_inv_sqrt[v] = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
  }
  std::vector<double> w_over_s(m, 0.0);
  for (std::size_t e = 0; e < m; ++e) {
    double s = 0.0;
    for (std::size_t v = 0; v < n; ++v) s += h(v, e);
    w_over_s[e] = s > 0.0 ? hg.edge_weights[e] / s : 0.0;
  }

  // left = D^{-1/2} H W S^{-1}, right = Hᵀ D^{-1/2}
  Matrix left(n, m);
  Matrix right(m, n);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t e = 0; e < m; ++e) {
      left(v, e) = d_inv_sqrt[v] * h(v, e) * w_over_s[e];
      right(e, v) = h(v, e) * d_inv_sqrt[v];
    }
  }
  Matrix op(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t e = 0; e < m; ++e) acc += left(i, e) * right(e, j);
      op(i, j) = acc;
    }
  }

  Matrix cur = x;
  for (std::size_t layer = 0; layer < cfg.num_layers; ++layer) {
    Matrix next(n, x.cols());
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < x.cols(); ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += op(i, j) * cur(j, k);
        next(i, k) = acc;
      }
    }
    cur = std::move(next);
  }
  return cur;
}

}  // namespace fedhgn
