#include "dygraf/graph_sequence.hpp"

#include <string>

#include "dygraf/errors.hpp"

namespace dygraf {

GraphSequence::GraphSequence(std::vector<SymNonNegMatrix> snapshots, bool monotone)
    : snapshots_(std::move(snapshots)), monotone_(monotone) {
  if (snapshots_.empty()) {
    throw DimensionError("GraphSequence: needs at least one snapshot");
  }
  n_ = snapshots_.front().size();
  for (std::size_t t = 0; t < snapshots_.size(); ++t) {
    if (snapshots_[t].size() != n_) {
      throw DimensionError("GraphSequence: snapshot " + std::to_string(t + 1) +
                           " is " + std::to_string(snapshots_[t].size()) + "x" +
                           std::to_string(snapshots_[t].size()) + ", expected n=" +
                           std::to_string(n_));
    }
  }
  if (monotone_) {
    for (std::size_t t = 1; t < snapshots_.size(); ++t) {
      const Matrix& prev = snapshots_[t - 1].matrix();
      const Matrix& cur = snapshots_[t].matrix();
      for (Index j = 0; j < n_; ++j) {
        for (Index i = 0; i < n_; ++i) {
          if (cur(i, j) < prev(i, j)) {
            throw DimensionError(
                "GraphSequence: monotonicity violated at t=" + std::to_string(t + 1) +
                ", (i,j)=(" + std::to_string(i) + "," + std::to_string(j) + "): " +
                std::to_string(cur(i, j)) + " < " + std::to_string(prev(i, j)));
          }
        }
      }
    }
  }
}

const Matrix& GraphSequence::at(Index t) const {
  if (t < 1 || t > horizon()) {
    throw std::out_of_range("GraphSequence::at: t=" + std::to_string(t) +
                            " outside [1, " + std::to_string(horizon()) + "]");
  }
  return snapshots_[static_cast<std::size_t>(t - 1)].matrix();
}

GraphSequence GraphSequence::prefix(Index t) const {
  if (t < 1 || t > horizon()) {
    throw std::out_of_range("GraphSequence::prefix: t=" + std::to_string(t) +
                            " outside [1, " + std::to_string(horizon()) + "]");
  }
  std::vector<SymNonNegMatrix> head(snapshots_.begin(),
                                    snapshots_.begin() + static_cast<std::ptrdiff_t>(t));
  return GraphSequence(std::move(head), monotone_);
}

}  // namespace dygraf
