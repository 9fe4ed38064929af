#include "dygraf/baselines.hpp"

#include <string>

#include "dygraf/errors.hpp"

namespace dygraf {

PredictorTensor ridge_fit(const DescriptorSeries& descriptors, const FeatureSeries& features,
                          double kappa) {
  if (kappa < 0.0) {
    throw std::invalid_argument("ridge_fit: kappa must be nonnegative");
  }
  const Index t_count = features.horizon();
  if (t_count < 2 || descriptors.horizon() != t_count) {
    throw DimensionError("ridge_fit: needs aligned series with horizon >= 2");
  }
  const Index n = features.node_count();
  const Index d = descriptors.dim();
  const Index q = features.dim();

  PredictorTensor w = PredictorTensor::zero(n, d, q);
  Matrix normal(d, d);
  Matrix rhs(d, q);
  for (Index i = 0; i < n; ++i) {
    normal = 0.5 * kappa * Matrix::Identity(d, d);
    rhs.setZero();
    for (Index t = 0; t + 1 < t_count; ++t) {
      const auto row = descriptors.frames[static_cast<std::size_t>(t)].row(i);
      normal.noalias() += row.transpose() * row;
      rhs.noalias() +=
          row.transpose() * features.frames[static_cast<std::size_t>(t + 1)].row(i);
    }
    if (kappa == 0.0) {
      Eigen::SelfAdjointEigenSolver<Matrix> eig(normal);
      const double largest = eig.eigenvalues().cwiseAbs().maxCoeff();
      if (largest <= 0.0 || eig.eigenvalues().minCoeff() <= 1e-12 * largest) {
        throw NumericError("ridge_fit: singular normal matrix for node " + std::to_string(i) +
                           " with kappa = 0; use kappa > 0");
      }
    }
    w.blocks[static_cast<std::size_t>(i)] = normal.ldlt().solve(rhs);
  }
  return w;
}

FitResult rank_free_fit(const TrainingData& data, Hyperparameters h, const OptimizerConfig& cfg,
                        const HoldOut* validation) {
  h.tau = 0.0;
  return fit(initial_state(data), data, h, cfg, validation);
}

Matrix shrinkage_only(const SymNonNegMatrix& a_last, double mu) {
  return shrink(a_last.matrix(), mu);
}

}  // namespace dygraf
