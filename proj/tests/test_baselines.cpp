#include <cmath>

#include "doctest.h"
#include "dygraf/baselines.hpp"
#include "dygraf/errors.hpp"
#include "dygraf/rng.hpp"
#include "dygraf/synthetic.hpp"
#include "test_support.hpp"

using namespace dygraf;
using dygraf::testing::random_matrix;
using dygraf::testing::random_predictor;
using dygraf::testing::random_training_data;

namespace {

double tensor_distance(const PredictorTensor& a, const PredictorTensor& b) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.blocks.size(); ++i) {
    d2 += (a.blocks[i] - b.blocks[i]).squaredNorm();
  }
  return std::sqrt(d2);
}

// training data whose targets are exactly X_{t+1} = Phi_t * B per node
TrainingData realizable_data(Rng& rng, Index n, Index q, Index t_count,
                             PredictorTensor* truth_out) {
  TrainingData data = random_training_data(rng, n, q, t_count);
  PredictorTensor truth = random_predictor(rng, n, 3 * q, q);
  // rebuild features so that each next frame is the exact prediction;
  // descriptors are regenerated after each frame to stay consistent
  for (Index t = 0; t + 1 < t_count; ++t) {
    DescriptorSeries desc = build_descriptors(data.features);
    const Matrix& phi = desc.frames[static_cast<std::size_t>(t)];
    Matrix next(n, q);
    for (Index i = 0; i < n; ++i) {
      next.row(i) = phi.row(i) * truth.blocks[static_cast<std::size_t>(i)];
    }
    data.features.frames[static_cast<std::size_t>(t + 1)] = next;
  }
  data.descriptors = build_descriptors(data.features);
  if (truth_out != nullptr) *truth_out = truth;
  return data;
}

}  // namespace

TEST_CASE("ridge recovers the generating predictor on noiseless realizable data") {
  Rng rng(71);
  const Index n = 4, q = 2, t_count = 12;
  PredictorTensor truth;
  const TrainingData data = realizable_data(rng, n, q, t_count, &truth);

  const PredictorTensor w = ridge_fit(data.descriptors, data.features, 1e-10);
  double residual = 0.0;
  for (Index t = 0; t + 1 < t_count; ++t) {
    residual += squared_loss(predict(w, data.descriptors.frames[static_cast<std::size_t>(t)]),
                             data.features.frames[static_cast<std::size_t>(t + 1)]);
  }
  CHECK(residual <= 1e-12 * (1.0 + truth.squared_norm()));
  CHECK(tensor_distance(w, truth) <= 1e-4 * std::max(1.0, truth.norm()));
}

TEST_CASE("ridge shrinks to zero as kappa grows") {
  Rng rng(72);
  const TrainingData data = random_training_data(rng, 4, 2, 8);
  const PredictorTensor w = ridge_fit(data.descriptors, data.features, 1e12);
  CHECK(w.norm() <= 1e-6);
}

TEST_CASE("ridge matches an iterative descent oracle") {
  Rng rng(73);
  const TrainingData data = random_training_data(rng, 3, 2, 9);
  const double kappa = 0.7;
  const PredictorTensor closed = ridge_fit(data.descriptors, data.features, kappa);

  // plain gradient descent on the same strictly convex objective
  const Index n = 3, d = 6, q = 2;
  PredictorTensor w = PredictorTensor::zero(n, d, q);
  for (Index i = 0; i < n; ++i) {
    Matrix hessian = 0.5 * kappa * Matrix::Identity(d, d);
    for (Index t = 0; t + 1 < 9; ++t) {
      const auto row = data.descriptors.frames[static_cast<std::size_t>(t)].row(i);
      hessian.noalias() += row.transpose() * row;
    }
    const double step =
        1.0 / (2.0 * Eigen::SelfAdjointEigenSolver<Matrix>(hessian).eigenvalues().maxCoeff());
    for (int it = 0; it < 60000; ++it) {
      Matrix grad = kappa * w.blocks[static_cast<std::size_t>(i)];
      for (Index t = 0; t + 1 < 9; ++t) {
        const auto row = data.descriptors.frames[static_cast<std::size_t>(t)].row(i);
        grad.noalias() +=
            2.0 * row.transpose() *
            (row * w.blocks[static_cast<std::size_t>(i)] -
             data.features.frames[static_cast<std::size_t>(t + 1)].row(i));
      }
      w.blocks[static_cast<std::size_t>(i)] -= step * grad;
    }
  }
  CHECK(tensor_distance(w, closed) <= 1e-6 * std::max(1.0, closed.norm()));
}

TEST_CASE("ridge residual grows with kappa") {
  Rng rng(74);
  const TrainingData data = random_training_data(rng, 4, 2, 10);
  double previous = -1.0;
  for (double kappa : {1e-4, 1e-2, 1.0, 1e2}) {
    const PredictorTensor w = ridge_fit(data.descriptors, data.features, kappa);
    double residual = 0.0;
    for (Index t = 0; t + 1 < 10; ++t) {
      residual += squared_loss(predict(w, data.descriptors.frames[static_cast<std::size_t>(t)]),
                               data.features.frames[static_cast<std::size_t>(t + 1)]);
    }
    CHECK(residual >= previous - 1e-10);
    previous = residual;
  }
}

TEST_CASE("ridge reports singular normal matrices at kappa zero") {
  Rng rng(75);
  // T-1 = 2 training pairs cannot determine d = 6 coefficients
  const TrainingData data = random_training_data(rng, 3, 2, 3);
  CHECK_THROWS_AS(ridge_fit(data.descriptors, data.features, 0.0), NumericError);
  CHECK_THROWS_AS(ridge_fit(data.descriptors, data.features, -1.0), std::invalid_argument);
}

TEST_CASE("rank-free fit is exactly the joint fit with tau zero") {
  GeneratorConfig gen;
  gen.n = 8;
  gen.T = 7;
  gen.seed = 77;
  FeatureMapConfig fmap;
  fmap.eigenvector_count = 2;
  fmap.cluster_count = 2;
  const TrainingData data = TrainingData::from_graphs(generate(gen).graphs, fmap);

  Hyperparameters h;
  h.kappa = 1.0;
  h.tau = 0.5;  // must be ignored
  h.nu = 1.0;
  h.lambda = 0.01;
  OptimizerConfig cfg;
  cfg.max_iters = 120;

  const FitResult via_baseline = rank_free_fit(data, h, cfg);
  Hyperparameters zeroed = h;
  zeroed.tau = 0.0;
  const FitResult direct = fit(initial_state(data), data, zeroed, cfg);

  REQUIRE(via_baseline.trace.records.size() == direct.trace.records.size());
  for (std::size_t i = 0; i < direct.trace.records.size(); ++i) {
    CHECK(via_baseline.trace.records[i].objective.total ==
          direct.trace.records[i].objective.total);
    CHECK(via_baseline.trace.records[i].step_size == direct.trace.records[i].step_size);
  }
  CHECK((via_baseline.state.s - direct.state.s).norm() == 0.0);
  CHECK(tensor_distance(via_baseline.state.w, direct.state.w) == 0.0);
}

TEST_CASE("shrinkage baseline") {
  Rng rng(78);
  const Matrix base = dygraf::testing::random_sym_nonneg(rng, 6);
  const SymNonNegMatrix a_last(base);

  CHECK((shrinkage_only(a_last, 0.0) - base).norm() == 0.0);

  const Vector sv = svd(base).singular_values;
  CHECK(shrinkage_only(a_last, sv(0)).isZero(0.0));

  // mu = sigma_2 keeps exactly the leading singular direction
  const Matrix kept = shrinkage_only(a_last, sv(1));
  CHECK(numerical_rank(svd(kept).singular_values) == 1);

  // soft-threshold identity on the nuclear norm
  for (double mu : {0.05, 0.3, 1.0}) {
    const Matrix out = shrinkage_only(a_last, mu);
    const Index rank = numerical_rank(svd(out).singular_values);
    CHECK(nuclear_norm(out) <=
          nuclear_norm(base) - mu * static_cast<double>(rank) + 1e-9);
  }
}
