#pragma once

#include <optional>
#include <string>

#include "dygraf/objective.hpp"
#include "dygraf/optimizer.hpp"

namespace dygraf {

/// Per-node ridge regression on the prediction term:
///   W_i = (sum_t phi_t_i^T phi_t_i + kappa/2 I)^-1 sum_t phi_t_i^T x_{t+1,i},
/// the exact minimizer of the squared prediction losses plus kappa/2 ||W||^2.
/// With kappa == 0 a singular normal matrix is reported as an error.
PredictorTensor ridge_fit(const DescriptorSeries& descriptors, const FeatureSeries& features,
                          double kappa);

/// The joint fit with the low-rank weight zeroed.
FitResult rank_free_fit(const TrainingData& data, Hyperparameters h, const OptimizerConfig& cfg,
                        const HoldOut* validation = nullptr);

/// Low-rank denoising of the last adjacency matrix by singular value
/// shrinkage; minimizes 1/2 ||S - A_T||_F^2 + mu ||S||_*.
Matrix shrinkage_only(const SymNonNegMatrix& a_last, double mu);

/// Prediction bundle in the shapes the joint method produces; methods that
/// address only one task leave the other side empty.
struct BaselineResult {
  std::optional<Matrix> predicted_features;  // n x q
  std::optional<Matrix> predicted_graph;     // n x n
  std::string method;
};

}  // namespace dygraf
