#include <gtest/gtest.h>

#include <cmath>

#include "fedhgn/error.hpp"
#include "fedhgn/propagation.hpp"
#include "test_support.hpp"

namespace fedhgn {
namespace {

Hypergraph with_edges(std::size_t nodes, std::vector<std::vector<NodeId>> edges, std::size_t dim = 2) {
  Hypergraph hg;
  hg.num_nodes = nodes;
  hg.num_classes = 1;
  hg.features = Matrix(nodes, dim);
  hg.edge_weights.assign(edges.size(), 1.0);
  hg.hyperedges = std::move(edges);
  return hg;
}

TEST(PropagateGlobal, SingleEdgeAveragesPair) {
  const auto hg = with_edges(2, {{0, 1}});
  const Matrix out = propagate_global(hg, Matrix::identity(2), {1});
  for (std::size_t r = 0; r < 2; ++r) {
    EXPECT_DOUBLE_EQ(out(r, 0), 0.5);
    EXPECT_DOUBLE_EQ(out(r, 1), 0.5);
  }
}

TEST(PropagateGlobal, IsolatedNodeGivesZeroRow) {
  const auto hg = with_edges(3, {{0, 1}});
  Matrix x(3, 2, 7.0);
  const Matrix out = propagate_global(hg, x, {1});
  EXPECT_EQ(out(2, 0), 0.0);
  EXPECT_EQ(out(2, 1), 0.0);
}

TEST(PropagateGlobal, RejectsWrongRowCount) {
  const auto hg = with_edges(3, {{0, 1}});
  try {
    propagate_global(hg, Matrix(2, 2), {1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(PropagateGlobal, RejectsZeroLayers) {
  EXPECT_THROW(propagate_global(with_edges(2, {{0, 1}}), Matrix(2, 1), {0}), Error);
}

TEST(PropagateGlobal, MatchesDenseReference) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto hg = testing::random_hypergraph(20 + seed * 6, 10 + seed * 2, 3, 2, seed);
    for (std::size_t layers : {1u, 2u, 3u}) {
      const Matrix sparse = propagate_global(hg, hg.features, {layers});
      const Matrix dense = dense_reference_propagate(hg, hg.features, {layers});
      ASSERT_LT(max_abs_diff(sparse, dense), 1e-9) << "seed " << seed << " N=" << layers;
    }
  }
}

TEST(PropagateGlobal, IsLinear) {
  std::mt19937_64 rng(11);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto hg = testing::random_hypergraph(60, 30, 4, 2, seed);
    const Matrix x = testing::random_matrix(60, 4, rng);
    const Matrix z = testing::random_matrix(60, 4, rng);
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    const double a = coef(rng);
    const double b = coef(rng);
    Matrix mix(60, 4);
    for (std::size_t i = 0; i < mix.size(); ++i) mix.values()[i] = a * x.values()[i] + b * z.values()[i];
    const Matrix lhs = propagate_global(hg, mix, {2});
    const Matrix px = propagate_global(hg, x, {2});
    const Matrix pz = propagate_global(hg, z, {2});
    Matrix rhs(60, 4);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs.values()[i] = a * px.values()[i] + b * pz.values()[i];
    EXPECT_LT(max_abs_diff(lhs, rhs), 1e-9);
  }
}

TEST(PropagateGlobal, ZeroDegreeRowsStayZero) {
  auto hg = testing::random_hypergraph(40, 5, 3, 2, 3, false, 3);
  std::vector<bool> covered(40, false);
  for (const auto& e : hg.hyperedges)
    for (NodeId v : e) covered[v] = true;
  for (std::size_t layers = 1; layers <= 5; ++layers) {
    const Matrix out = propagate_global(hg, hg.features, {layers});
    for (NodeId v = 0; v < 40; ++v) {
      if (covered[v]) continue;
      for (double x : out.row(v)) ASSERT_EQ(x, 0.0);
    }
  }
}

TEST(EdgeGather, ScalesByInverseRootDegree) {
  Matrix x(1, 1, 8.0);
  std::vector<double> deg{4.0};
  std::vector<NodeId> members{0};
  EXPECT_EQ(edge_gather(members, x, deg), (std::vector<double>{4.0}));
}

TEST(EdgeGather, EmptyMembersGiveZero) {
  Matrix x(2, 3, 1.0);
  std::vector<double> deg{1.0, 1.0};
  EXPECT_EQ(edge_gather({}, x, deg), (std::vector<double>{0, 0, 0}));
}

TEST(EdgeGather, MatchesScalarLoop) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix x = testing::random_matrix(10, 4, rng);
    std::uniform_real_distribution<double> dd(0.5, 5.0);
    std::vector<double> deg(10);
    for (double& d : deg) d = dd(rng);
    deg[3] = 0.0;
    std::vector<NodeId> members{1, 3, 4, 7, 9};
    std::vector<double> expect(4, 0.0);
    for (std::size_t k = 0; k < 4; ++k)
      for (NodeId u : members)
        if (deg[u] > 0) expect[k] += x(u, k) / std::sqrt(deg[u]);
    EXPECT_LT(testing::max_abs(edge_gather(members, x, deg), expect), 1e-12);
  }
}

TEST(NodeAggregate, SingleEdge) {
  std::vector<double> delta{1.0, 1.0};
  std::vector<IncidentEdge> edges{{1.0, 2, delta}};
  EXPECT_EQ(node_aggregate(edges, 1.0, 2), (std::vector<double>{0.5, 0.5}));
}

TEST(NodeAggregate, ZeroDegreeGivesZero) {
  std::vector<double> delta{3.0, 1.0};
  std::vector<IncidentEdge> edges{{1.0, 2, delta}};
  EXPECT_EQ(node_aggregate(edges, 0.0, 2), (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(node_aggregate({}, 2.0, 2), (std::vector<double>{0.0, 0.0}));
}

TEST(NodeAggregate, MatchesScalarLoop) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.1, 4.0);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<double>> deltas(3, std::vector<double>(5));
    std::vector<IncidentEdge> edges;
    for (auto& d : deltas) {
      for (double& v : d) v = g(rng);
      edges.push_back({u(rng), static_cast<std::size_t>(1 + trial % 6), d});
    }
    const double dv = u(rng);
    std::vector<double> expect(5, 0.0);
    for (std::size_t k = 0; k < 5; ++k)
      for (const auto& e : edges) expect[k] += e.weight / (e.degree * std::sqrt(dv)) * e.embedding[k];
    EXPECT_LT(testing::max_abs(node_aggregate(edges, dv, 5), expect), 1e-12);
  }
}

TEST(PropagateCombined, Sums) {
  EXPECT_EQ(propagate_combined(std::vector<double>{1, 2}, std::vector<double>{0, 0}), (std::vector<double>{1, 2}));
  EXPECT_EQ(propagate_combined(std::vector<double>{0, 0}, std::vector<double>{3, 4}), (std::vector<double>{3, 4}));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<double> a(6), b(6), sum(6);
  for (std::size_t i = 0; i < 6; ++i) {
    a[i] = g(rng);
    b[i] = g(rng);
    sum[i] = a[i] + b[i];
  }
  EXPECT_EQ(propagate_combined(a, b), sum);
  EXPECT_THROW(propagate_combined(std::vector<double>{1}, std::vector<double>{1, 2}), Error);
}

TEST(Decomposition, GatherThenAggregateReproducesOneStep) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto hg = testing::random_hypergraph(80, 40, 3, 2, seed + 50);
    const auto idx = build_incidence(hg);
    const auto deg = compute_degrees(hg, idx);
    std::vector<std::vector<double>> deltas;
    for (const auto& e : hg.hyperedges) deltas.push_back(edge_gather(e, hg.features, deg.node_degree));
    Matrix composed(hg.num_nodes, 3);
    for (NodeId v = 0; v < hg.num_nodes; ++v) {
      std::vector<IncidentEdge> inc;
      for (EdgeId e : idx.node_to_edges[v]) inc.push_back({hg.edge_weights[e], hg.hyperedges[e].size(), deltas[e]});
      const auto phi = node_aggregate(inc, deg.node_degree[v], 3);
      std::copy(phi.begin(), phi.end(), composed.row(v).begin());
    }
    EXPECT_LT(max_abs_diff(composed, dense_reference_propagate(hg, hg.features, {1})), 1e-9);
  }
}

TEST(DenseReference, SelfLoopNodeIsIdentity) {
  auto hg = with_edges(1, {{0}}, 3);
  Matrix x(1, 3, std::vector<double>{1.5, -2.0, 4.0});
  EXPECT_EQ(dense_reference_propagate(hg, x, {1}), x);
}

TEST(DenseReference, GuardsSize) {
  auto hg = with_edges(kDenseReferenceMaxNodes + 1, {{0}}, 1);
  try {
    dense_reference_propagate(hg, hg.features, {1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooLarge);
  }
}

}  // namespace
}  // namespace fedhgn
