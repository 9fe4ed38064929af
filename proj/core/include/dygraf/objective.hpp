#pragma once

#include <optional>
#include <vector>

#include "dygraf/features.hpp"
#include "dygraf/graph_sequence.hpp"
#include "dygraf/matrix_ops.hpp"
#include "dygraf/types.hpp"

namespace dygraf {

/// One d x q predictor block per node. Node i's feature forecast is
/// phi_row(i) * block(i).
struct PredictorTensor {
  std::vector<Matrix> blocks;

  static PredictorTensor zero(Index n, Index d, Index q);

  Index node_count() const noexcept { return static_cast<Index>(blocks.size()); }
  Index input_dim() const noexcept { return blocks.empty() ? 0 : blocks.front().rows(); }
  Index output_dim() const noexcept { return blocks.empty() ? 0 : blocks.front().cols(); }

  double squared_norm() const noexcept;
  double norm() const noexcept;
  bool all_finite() const noexcept;

  PredictorTensor& operator+=(const PredictorTensor& other);
  PredictorTensor& operator-=(const PredictorTensor& other);
  PredictorTensor& operator*=(double scale);
};

PredictorTensor operator+(PredictorTensor a, const PredictorTensor& b);
PredictorTensor operator-(PredictorTensor a, const PredictorTensor& b);
PredictorTensor operator*(double scale, PredictorTensor a);

/// Joint decision variables: predictors W and next-graph estimate S. The
/// objective is defined for any square S; the optimizer keeps iterates
/// symmetric nonnegative by projection.
struct ModelState {
  PredictorTensor w;
  Matrix s;
};

/// Regularization weights of the joint objective plus the smoothing
/// parameter eta for the nuclear norm surrogate.
struct Hyperparameters {
  double kappa = 1.0;   // predictor ridge weight
  double tau = 0.1;     // nuclear norm weight
  double nu = 1.0;      // graph proximity weight
  double lambda = 0.01; // Laplacian coupling weight
  double eta = 1e-3;    // nuclear smoothing

  /// tau/nu, defined only when nu > 0.
  std::optional<double> mu() const {
    if (nu > 0.0) return tau / nu;
    return std::nullopt;
  }
  void validate() const;
};

/// Weighted values of the six objective terms; total is their sum.
struct ObjectiveBreakdown {
  double j1_fit = 0.0;        // sum_t loss(W Phi_t, X_{t+1})
  double j1_ridge = 0.0;      // kappa/2 ||W||_F^2
  double j2_nuclear = 0.0;    // tau g_eta(S)
  double j2_prox = 0.0;       // nu/2 ||S - A_T||_F^2
  double j3_coupling = 0.0;   // loss(W Phi_T, S Omega)
  double j4_laplacian = 0.0;  // lambda Tr(S^T Delta(W))
  double total = 0.0;
};

/// Everything a fit needs: the training graphs A_1..A_T, their features,
/// descriptors, and the feature map. Frames are aligned: features.frames[t]
/// and descriptors.frames[t] belong to graphs.at(t+1).
struct TrainingData {
  GraphSequence graphs;
  FeatureSeries features;
  DescriptorSeries descriptors;
  FeatureMap map;

  Index node_count() const noexcept { return graphs.node_count(); }
  Index horizon() const noexcept { return graphs.horizon(); }

  /// Builds map, features and descriptors from a graph window.
  static TrainingData from_graphs(GraphSequence g, const FeatureMapConfig& cfg = {});
  void validate() const;
};

/// Row i of the result is phi.row(i) * w.block(i).
Matrix predict(const PredictorTensor& w, const Matrix& phi);

/// ||prediction - target||_F^2.
double squared_loss(const Matrix& prediction, const Matrix& target);

/// Delta(W): matrix of squared Frobenius distances between predictor blocks.
SymNonNegMatrix pairwise_dist(const PredictorTensor& w);

/// Tr(S^T Delta(W)) = sum_ij S_ij ||W_i - W_j||_F^2; equals twice the
/// Laplacian quadratic form of S applied to W.
double laplacian_coupling(const PredictorTensor& w, const Matrix& s);

ObjectiveBreakdown evaluate(const ModelState& state, const TrainingData& data,
                            const Hyperparameters& h);

struct Gradient {
  PredictorTensor w;
  Matrix s;

  double squared_norm() const noexcept { return w.squared_norm() + s.squaredNorm(); }
  double norm() const noexcept;
  bool all_finite() const noexcept { return w.all_finite() && s.allFinite(); }
};

Gradient gradient(const ModelState& state, const TrainingData& data,
                  const Hyperparameters& h);

}  // namespace dygraf
