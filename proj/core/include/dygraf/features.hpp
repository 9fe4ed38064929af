#pragma once

#include <cstdint>
#include <vector>

#include "dygraf/graph_sequence.hpp"
#include "dygraf/types.hpp"

namespace dygraf {

enum class FeatureColumnKind { Constant, ClusterIndicator, Eigenvector };

/// Linear feature map X_t = A_t * omega. Columns are, in order: the all-ones
/// vector, 0/1 cluster indicators partitioning the nodes, and top
/// eigenvectors of the reference adjacency matrix (the last snapshot of the
/// sequence the map was built from). The map is built once and held fixed
/// across time.
struct FeatureMap {
  Matrix omega;                                // n x q
  std::vector<FeatureColumnKind> provenance;   // one entry per column

  Index node_count() const noexcept { return omega.rows(); }
  Index dim() const noexcept { return omega.cols(); }
};

struct FeatureSeries {
  std::vector<Matrix> frames;  // T frames, each n x q

  Index horizon() const noexcept { return static_cast<Index>(frames.size()); }
  Index dim() const noexcept { return frames.empty() ? 0 : frames.front().cols(); }
  Index node_count() const noexcept { return frames.empty() ? 0 : frames.front().rows(); }
};

/// Per-time descriptors [X_t | X_t - X_{t-1} | X_t - 2 X_{t-1} + X_{t-2}]:
/// value, velocity and acceleration blocks, d = 3q.
struct DescriptorSeries {
  std::vector<Matrix> frames;  // T frames, each n x 3q
  Index feature_dim = 0;       // q

  Index horizon() const noexcept { return static_cast<Index>(frames.size()); }
  Index dim() const noexcept { return 3 * feature_dim; }
};

struct FeatureMapConfig {
  Index eigenvector_count = 5;
  Index cluster_count = 4;
  /// Seed for the k-means restarts inside spectral clustering; fixed so a
  /// given graph always yields the same map.
  std::uint64_t clustering_seed = 9309;
};

/// Builds omega = [1_n | cluster indicators | top eigenvectors] from the
/// last snapshot of g. Cluster indicators come from spectral clustering:
/// k-means (20 restarts) on rows of the top-k eigenvector matrix.
FeatureMap build_feature_map(const GraphSequence& g, Index eigenvector_count,
                             Index cluster_count,
                             std::uint64_t clustering_seed = FeatureMapConfig{}.clustering_seed);
FeatureMap build_feature_map(const GraphSequence& g, const FeatureMapConfig& cfg);

FeatureSeries apply_feature_map(const GraphSequence& g, const FeatureMap& map);

DescriptorSeries build_descriptors(const FeatureSeries& x);

/// K-means labels (values in [0, k)) for the rows of points; labels are
/// canonicalized by first occurrence so the result is deterministic.
std::vector<Index> kmeans_labels(const Matrix& points, Index k, std::uint64_t seed,
                                 int restarts = 20, int max_iters = 100);

}  // namespace dygraf
