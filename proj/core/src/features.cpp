#include "dygraf/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dygraf/errors.hpp"
#include "dygraf/matrix_ops.hpp"
#include "dygraf/rng.hpp"

namespace dygraf {

namespace {

double squared_distance(const Matrix& points, Index row, const Matrix& centers, Index c) {
  return (points.row(row) - centers.row(c)).squaredNorm();
}

struct KmeansRun {
  std::vector<Index> labels;
  double inertia = std::numeric_limits<double>::infinity();
};

KmeansRun lloyd_once(const Matrix& points, Index k, Rng& rng, int max_iters) {
  const Index n = points.rows();
  Matrix centers(k, points.cols());

  // k-means++ seeding
  std::vector<double> dist2(static_cast<std::size_t>(n),
                            std::numeric_limits<double>::infinity());
  Index first = static_cast<Index>(rng.uniform() * static_cast<double>(n));
  first = std::min(first, n - 1);
  centers.row(0) = points.row(first);
  for (Index c = 1; c < k; ++c) {
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
      dist2[static_cast<std::size_t>(i)] =
          std::min(dist2[static_cast<std::size_t>(i)], squared_distance(points, i, centers, c - 1));
      total += dist2[static_cast<std::size_t>(i)];
    }
    Index chosen = n - 1;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      double acc = 0.0;
      for (Index i = 0; i < n; ++i) {
        acc += dist2[static_cast<std::size_t>(i)];
        if (acc >= target) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = std::min(static_cast<Index>(rng.uniform() * static_cast<double>(n)), n - 1);
    }
    centers.row(c) = points.row(chosen);
  }

  KmeansRun run;
  run.labels.assign(static_cast<std::size_t>(n), 0);
  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      Index best = 0;
      double best_d = squared_distance(points, i, centers, 0);
      for (Index c = 1; c < k; ++c) {
        const double d = squared_distance(points, i, centers, c);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (run.labels[static_cast<std::size_t>(i)] != best) {
        run.labels[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }

    Matrix sums = Matrix::Zero(k, points.cols());
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      sums.row(run.labels[static_cast<std::size_t>(i)]) += points.row(i);
      ++counts[static_cast<std::size_t>(run.labels[static_cast<std::size_t>(i)])];
    }
    for (Index c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      } else {
        // reseed an empty cluster at the point farthest from its center
        Index far = 0;
        double far_d = -1.0;
        for (Index i = 0; i < n; ++i) {
          const double d =
              squared_distance(points, i, centers, run.labels[static_cast<std::size_t>(i)]);
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        centers.row(c) = points.row(far);
        run.labels[static_cast<std::size_t>(far)] = c;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;
  }

  run.inertia = 0.0;
  for (Index i = 0; i < n; ++i) {
    run.inertia += squared_distance(points, i, centers, run.labels[static_cast<std::size_t>(i)]);
  }
  return run;
}

}  // namespace

std::vector<Index> kmeans_labels(const Matrix& points, Index k, std::uint64_t seed,
                                 int restarts, int max_iters) {
  const Index n = points.rows();
  if (k < 1 || k > n) {
    throw std::invalid_argument("kmeans_labels: k must be in [1, n]");
  }
  Rng rng(seed);
  KmeansRun best;
  for (int r = 0; r < restarts; ++r) {
    KmeansRun run = lloyd_once(points, k, rng, max_iters);
    if (run.inertia < best.inertia) best = std::move(run);
  }

  // canonical labels: cluster of the lowest-index node is 0, next new one is 1, ...
  std::vector<Index> remap(static_cast<std::size_t>(k), -1);
  Index next = 0;
  std::vector<Index> labels(best.labels.size());
  for (std::size_t i = 0; i < best.labels.size(); ++i) {
    Index& slot = remap[static_cast<std::size_t>(best.labels[i])];
    if (slot < 0) slot = next++;
    labels[i] = slot;
  }
  return labels;
}

FeatureMap build_feature_map(const GraphSequence& g, Index eigenvector_count,
                             Index cluster_count, std::uint64_t clustering_seed) {
  if (eigenvector_count < 0 || cluster_count < 0) {
    throw std::invalid_argument("build_feature_map: counts must be nonnegative");
  }
  const Index n = g.node_count();
  const Index q = 1 + cluster_count + eigenvector_count;
  if (q > n) {
    throw DimensionError("build_feature_map: 1 + clusters + eigenvectors = " +
                         std::to_string(q) + " exceeds n = " + std::to_string(n));
  }

  const SymNonNegMatrix& reference = g.snapshots().back();

  FeatureMap map;
  map.omega.resize(n, q);
  map.provenance.reserve(static_cast<std::size_t>(q));

  map.omega.col(0) = Vector::Ones(n);
  map.provenance.push_back(FeatureColumnKind::Constant);

  if (cluster_count > 0) {
    Matrix embedding = top_eigenvectors(reference, cluster_count);
    std::vector<Index> labels = kmeans_labels(embedding, cluster_count, clustering_seed);
    for (Index c = 0; c < cluster_count; ++c) {
      Vector indicator = Vector::Zero(n);
      for (Index i = 0; i < n; ++i) {
        if (labels[static_cast<std::size_t>(i)] == c) indicator(i) = 1.0;
      }
      map.omega.col(1 + c) = indicator;
      map.provenance.push_back(FeatureColumnKind::ClusterIndicator);
    }
  }

  if (eigenvector_count > 0) {
    map.omega.rightCols(eigenvector_count) = top_eigenvectors(reference, eigenvector_count);
    for (Index j = 0; j < eigenvector_count; ++j) {
      map.provenance.push_back(FeatureColumnKind::Eigenvector);
    }
  }
  return map;
}

FeatureMap build_feature_map(const GraphSequence& g, const FeatureMapConfig& cfg) {
  return build_feature_map(g, cfg.eigenvector_count, cfg.cluster_count, cfg.clustering_seed);
}

FeatureSeries apply_feature_map(const GraphSequence& g, const FeatureMap& map) {
  if (map.node_count() != g.node_count()) {
    throw DimensionError("apply_feature_map: map has " + std::to_string(map.node_count()) +
                         " rows, graph has n = " + std::to_string(g.node_count()));
  }
  FeatureSeries out;
  out.frames.reserve(static_cast<std::size_t>(g.horizon()));
  for (const SymNonNegMatrix& a : g.snapshots()) {
    out.frames.push_back(a.matrix() * map.omega);
  }
  return out;
}

DescriptorSeries build_descriptors(const FeatureSeries& x) {
  const Index t_count = x.horizon();
  if (t_count < 1) {
    throw DimensionError("build_descriptors: empty feature series");
  }
  const Index q = x.dim();
  const Index n = x.node_count();

  DescriptorSeries out;
  out.feature_dim = q;
  out.frames.reserve(static_cast<std::size_t>(t_count));
  // missing frames before t=1 are treated as copies of X_1
  auto frame = [&](Index t) -> const Matrix& {
    return x.frames[static_cast<std::size_t>(std::max<Index>(t, 0))];
  };
  for (Index t = 0; t < t_count; ++t) {
    Matrix phi(n, 3 * q);
    const Matrix& cur = x.frames[static_cast<std::size_t>(t)];
    const Matrix& prev = frame(t - 1);
    const Matrix& prev2 = frame(t - 2);
    phi.leftCols(q) = cur;
    phi.middleCols(q, q) = cur - prev;
    phi.rightCols(q) = cur - 2.0 * prev + prev2;
    out.frames.push_back(std::move(phi));
  }
  return out;
}

}  // namespace dygraf
