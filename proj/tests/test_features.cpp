#include <queue>
#include <vector>

#include "doctest.h"
#include "dygraf/errors.hpp"
#include "dygraf/features.hpp"
#include "dygraf/rng.hpp"
#include "dygraf/synthetic.hpp"
#include "test_support.hpp"

using namespace dygraf;
using dygraf::testing::random_matrix;
using dygraf::testing::random_sym_nonneg;

namespace {

GraphSequence single_graph(Matrix a) {
  std::vector<SymNonNegMatrix> snaps;
  snaps.emplace_back(std::move(a));
  return GraphSequence(std::move(snaps), false);
}

// breadth-first search connected components, the oracle for cluster recovery
std::vector<Index> bfs_components(const Matrix& a) {
  const Index n = a.rows();
  std::vector<Index> component(static_cast<std::size_t>(n), -1);
  Index next = 0;
  for (Index start = 0; start < n; ++start) {
    if (component[static_cast<std::size_t>(start)] >= 0) continue;
    std::queue<Index> frontier;
    frontier.push(start);
    component[static_cast<std::size_t>(start)] = next;
    while (!frontier.empty()) {
      const Index u = frontier.front();
      frontier.pop();
      for (Index v = 0; v < n; ++v) {
        if (a(u, v) > 0.0 && component[static_cast<std::size_t>(v)] < 0) {
          component[static_cast<std::size_t>(v)] = next;
          frontier.push(v);
        }
      }
    }
    ++next;
  }
  return component;
}

Matrix two_cliques(Index size_a, Index size_b) {
  const Index n = size_a + size_b;
  Matrix a = Matrix::Zero(n, n);
  for (Index i = 0; i < size_a; ++i) {
    for (Index j = 0; j < size_a; ++j) {
      if (i != j) a(i, j) = 1.0;
    }
  }
  for (Index i = size_a; i < n; ++i) {
    for (Index j = size_a; j < n; ++j) {
      if (i != j) a(i, j) = 1.0;
    }
  }
  return a;
}

}  // namespace

TEST_CASE("feature map with only the constant column gives degrees") {
  Rng rng(31);
  GraphSequence g = single_graph(random_sym_nonneg(rng, 6));
  const FeatureMap map = build_feature_map(g, 0, 0);
  CHECK(map.dim() == 1);
  CHECK((map.omega.col(0) - Vector::Ones(6)).norm() == 0.0);

  const FeatureSeries x = apply_feature_map(g, map);
  CHECK((x.frames[0].col(0) - g.at(1).rowwise().sum()).norm() <= 1e-12);
}

TEST_CASE("feature map column layout and indicator partition") {
  GeneratorConfig cfg;
  cfg.n = 100;
  cfg.T = 5;
  cfg.seed = 3;
  const SyntheticData synthetic = generate(cfg);
  const FeatureMap map = build_feature_map(synthetic.graphs, 5, 4);
  CHECK(map.dim() == 10);
  CHECK(map.provenance[0] == FeatureColumnKind::Constant);
  Vector indicator_sum = Vector::Zero(100);
  for (Index c = 1; c <= 4; ++c) {
    CHECK(map.provenance[static_cast<std::size_t>(c)] == FeatureColumnKind::ClusterIndicator);
    for (Index i = 0; i < 100; ++i) {
      const double v = map.omega(i, c);
      CHECK((v == 0.0 || v == 1.0));
    }
    indicator_sum += map.omega.col(c);
  }
  CHECK((indicator_sum - Vector::Ones(100)).norm() == 0.0);
  for (Index c = 5; c < 10; ++c) {
    CHECK(map.provenance[static_cast<std::size_t>(c)] == FeatureColumnKind::Eigenvector);
  }

  // deterministic: same graph, same map
  const FeatureMap again = build_feature_map(synthetic.graphs, 5, 4);
  CHECK((map.omega - again.omega).norm() == 0.0);
}

TEST_CASE("cluster indicators recover disconnected cliques") {
  GraphSequence g = single_graph(two_cliques(5, 3));
  const FeatureMap map = build_feature_map(g, 0, 2);
  const std::vector<Index> truth = bfs_components(g.at(1));
  for (Index c = 1; c <= 2; ++c) {
    // each indicator column must be constant on each true component
    Index label_first = -1;
    for (Index comp = 0; comp < 2; ++comp) {
      double seen = -1.0;
      for (Index i = 0; i < 8; ++i) {
        if (truth[static_cast<std::size_t>(i)] != comp) continue;
        if (seen < 0.0) {
          seen = map.omega(i, c);
        } else {
          CHECK(map.omega(i, c) == seen);
        }
      }
      (void)label_first;
    }
  }
}

TEST_CASE("feature map rejects dimension overflow") {
  Rng rng(32);
  GraphSequence g = single_graph(random_sym_nonneg(rng, 4));
  CHECK_THROWS_AS(build_feature_map(g, 3, 1), DimensionError);
  CHECK_THROWS_AS(build_feature_map(g, -1, 0), std::invalid_argument);
}

TEST_CASE("apply_feature_map equals direct multiplication") {
  Rng rng(33);
  // identity snapshots return omega itself
  std::vector<SymNonNegMatrix> snaps;
  snaps.push_back(SymNonNegMatrix(Matrix::Identity(5, 5)));
  GraphSequence ident(std::move(snaps), false);
  FeatureMap map;
  map.omega = random_matrix(rng, 5, 3);
  const FeatureSeries x_ident = apply_feature_map(ident, map);
  CHECK((x_ident.frames[0] - map.omega).norm() == 0.0);

  // random graphs match the triple-loop product
  std::vector<SymNonNegMatrix> snaps2;
  for (int t = 0; t < 3; ++t) snaps2.push_back(SymNonNegMatrix::trusted(random_sym_nonneg(rng, 5)));
  GraphSequence g(std::move(snaps2), false);
  const FeatureSeries x = apply_feature_map(g, map);
  for (Index t = 1; t <= 3; ++t) {
    const Matrix& a = g.at(t);
    for (Index i = 0; i < 5; ++i) {
      for (Index j = 0; j < 3; ++j) {
        double acc = 0.0;
        for (Index k = 0; k < 5; ++k) acc += a(i, k) * map.omega(k, j);
        CHECK(x.frames[static_cast<std::size_t>(t - 1)](i, j) == doctest::Approx(acc).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("apply_feature_map is linear in the graph sequence") {
  Rng rng(34);
  FeatureMap map;
  map.omega = random_matrix(rng, 5, 2);
  const Matrix a1 = random_sym_nonneg(rng, 5);
  const Matrix a2 = random_sym_nonneg(rng, 5);
  const double alpha = 0.7;
  const double beta = 1.3;
  auto as_seq = [](Matrix m) {
    std::vector<SymNonNegMatrix> snaps;
    snaps.push_back(SymNonNegMatrix::trusted(std::move(m)));
    return GraphSequence(std::move(snaps), false);
  };
  const Matrix combined = alpha * a1 + beta * a2;
  const Matrix lhs = apply_feature_map(as_seq(combined), map).frames[0];
  const Matrix rhs = alpha * apply_feature_map(as_seq(a1), map).frames[0] +
                     beta * apply_feature_map(as_seq(a2), map).frames[0];
  CHECK((lhs - rhs).norm() <= 1e-12 * std::max(1.0, rhs.norm()));
}

TEST_CASE("descriptors: constant, linear and quadratic series") {
  Rng rng(35);
  const Matrix b = random_matrix(rng, 4, 2);

  FeatureSeries constant;
  for (int t = 0; t < 5; ++t) constant.frames.push_back(b);
  const DescriptorSeries d_const = build_descriptors(constant);
  CHECK(d_const.dim() == 6);
  for (Index t = 2; t < 5; ++t) {
    const Matrix& phi = d_const.frames[static_cast<std::size_t>(t)];
    CHECK((phi.leftCols(2) - b).norm() == 0.0);
    CHECK(phi.middleCols(2, 2).isZero(0.0));
    CHECK(phi.rightCols(2).isZero(0.0));
  }

  FeatureSeries linear;
  for (int t = 1; t <= 5; ++t) linear.frames.push_back(static_cast<double>(t) * b);
  const DescriptorSeries d_lin = build_descriptors(linear);
  for (Index t = 2; t < 5; ++t) {
    const Matrix& phi = d_lin.frames[static_cast<std::size_t>(t)];
    CHECK((phi.middleCols(2, 2) - b).norm() <= 1e-12);
    CHECK(phi.rightCols(2).norm() <= 1e-12);
  }

  // second finite difference of t^2 is 2
  FeatureSeries quadratic;
  for (int t = 1; t <= 5; ++t) quadratic.frames.push_back(static_cast<double>(t * t) * b);
  const DescriptorSeries d_quad = build_descriptors(quadratic);
  for (Index t = 2; t < 5; ++t) {
    CHECK((d_quad.frames[static_cast<std::size_t>(t)].rightCols(2) - 2.0 * b).norm() <= 1e-11);
  }
}

TEST_CASE("descriptor padding keeps the first frames quiet") {
  Rng rng(36);
  FeatureSeries x;
  for (int t = 0; t < 4; ++t) x.frames.push_back(random_matrix(rng, 3, 2));
  const DescriptorSeries d = build_descriptors(x);
  CHECK(d.frames[0].middleCols(2, 2).isZero(0.0));
  CHECK(d.frames[0].rightCols(2).isZero(0.0));
  // at t=2 the missing X_0 is a copy of X_1, so acceleration equals velocity
  CHECK((d.frames[1].rightCols(2) - d.frames[1].middleCols(2, 2)).norm() <=
        1e-14 * (1.0 + d.frames[1].norm()));
}

TEST_CASE("descriptor value block recovers the feature series") {
  Rng rng(37);
  FeatureSeries x;
  for (int t = 0; t < 6; ++t) x.frames.push_back(random_matrix(rng, 4, 3));
  const DescriptorSeries d = build_descriptors(x);
  for (std::size_t t = 0; t < x.frames.size(); ++t) {
    CHECK((d.frames[t].leftCols(3) - x.frames[t]).norm() == 0.0);
  }
}

TEST_CASE("monotone sequence with nonnegative map gives nondecreasing value block") {
  GeneratorConfig cfg;
  cfg.n = 12;
  cfg.T = 6;
  cfg.seed = 5;
  const SyntheticData synthetic = generate(cfg);
  const FeatureMap map = build_feature_map(synthetic.graphs, 0, 3);  // constant + indicators >= 0
  const FeatureSeries x = apply_feature_map(synthetic.graphs, map);
  const DescriptorSeries d = build_descriptors(x);
  for (std::size_t t = 1; t < d.frames.size(); ++t) {
    const Matrix diff = d.frames[t].leftCols(map.dim()) - d.frames[t - 1].leftCols(map.dim());
    CHECK(diff.minCoeff() >= -1e-12);
  }
}
