#pragma once

#include <vector>

#include "dygraf/matrix_ops.hpp"
#include "dygraf/types.hpp"

namespace dygraf {

/// Ordered adjacency snapshots A_1..A_T over a fixed node set. When declared
/// monotone, edge weights must be entrywise nondecreasing in t; this is
/// checked on construction and violations are reported with their (t, i, j).
class GraphSequence {
 public:
  GraphSequence(std::vector<SymNonNegMatrix> snapshots, bool monotone);

  Index node_count() const noexcept { return n_; }
  Index horizon() const noexcept { return static_cast<Index>(snapshots_.size()); }
  bool monotone() const noexcept { return monotone_; }

  const std::vector<SymNonNegMatrix>& snapshots() const noexcept { return snapshots_; }

  /// 1-based access matching the A_<t> file naming.
  const Matrix& at(Index t) const;
  const Matrix& last() const { return snapshots_.back().matrix(); }

  /// Training window A_1..A_t (1-based, inclusive).
  GraphSequence prefix(Index t) const;

 private:
  std::vector<SymNonNegMatrix> snapshots_;
  Index n_ = 0;
  bool monotone_ = false;
};

}  // namespace dygraf
