#include "dygraf/objective.hpp"

#include <cmath>
#include <string>

#include "dygraf/errors.hpp"

namespace dygraf {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shapes " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " and " + std::to_string(b.rows()) +
                         "x" + std::to_string(b.cols()) + " differ");
  }
}

/// Blocks stacked side by side as a (d*q) x n matrix, column i = vec(W_i).
Matrix stack_blocks(const PredictorTensor& w) {
  const Index n = w.node_count();
  const Index d = w.input_dim();
  const Index q = w.output_dim();
  Matrix stacked(d * q, n);
  for (Index i = 0; i < n; ++i) {
    stacked.col(i) = Eigen::Map<const Vector>(w.blocks[static_cast<std::size_t>(i)].data(), d * q);
  }
  return stacked;
}

void check_dims(const ModelState& state, const TrainingData& data, const char* op) {
  const Index n = data.node_count();
  const Index q = data.features.dim();
  const Index d = data.descriptors.dim();
  if (data.horizon() < 2) {
    throw DimensionError(std::string(op) + ": training horizon must be at least 2");
  }
  if (state.w.node_count() != n || state.w.input_dim() != d || state.w.output_dim() != q) {
    throw DimensionError(std::string(op) + ": predictor tensor is " +
                         std::to_string(state.w.node_count()) + " blocks of " +
                         std::to_string(state.w.input_dim()) + "x" +
                         std::to_string(state.w.output_dim()) + ", data wants " +
                         std::to_string(n) + " blocks of " + std::to_string(d) + "x" +
                         std::to_string(q));
  }
  if (state.s.rows() != n || state.s.cols() != n) {
    throw DimensionError(std::string(op) + ": S is " + std::to_string(state.s.rows()) + "x" +
                         std::to_string(state.s.cols()) + ", expected " + std::to_string(n) +
                         "x" + std::to_string(n));
  }
}

}  // namespace

PredictorTensor PredictorTensor::zero(Index n, Index d, Index q) {
  PredictorTensor w;
  w.blocks.assign(static_cast<std::size_t>(n), Matrix::Zero(d, q));
  return w;
}

double PredictorTensor::squared_norm() const noexcept {
  double s = 0.0;
  for (const Matrix& b : blocks) s += b.squaredNorm();
  return s;
}

double PredictorTensor::norm() const noexcept { return std::sqrt(squared_norm()); }

bool PredictorTensor::all_finite() const noexcept {
  for (const Matrix& b : blocks) {
    if (!b.allFinite()) return false;
  }
  return true;
}

PredictorTensor& PredictorTensor::operator+=(const PredictorTensor& other) {
  for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i] += other.blocks[i];
  return *this;
}

PredictorTensor& PredictorTensor::operator-=(const PredictorTensor& other) {
  for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i] -= other.blocks[i];
  return *this;
}

PredictorTensor& PredictorTensor::operator*=(double scale) {
  for (Matrix& b : blocks) b *= scale;
  return *this;
}

PredictorTensor operator+(PredictorTensor a, const PredictorTensor& b) { return a += b; }
PredictorTensor operator-(PredictorTensor a, const PredictorTensor& b) { return a -= b; }
PredictorTensor operator*(double scale, PredictorTensor a) { return a *= scale; }

double Gradient::norm() const noexcept { return std::sqrt(squared_norm()); }

void Hyperparameters::validate() const {
  auto check = [](double v, const char* name, bool strictly_positive) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument(std::string("Hyperparameters: ") + name + " is not finite");
    }
    if (strictly_positive ? !(v > 0.0) : v < 0.0) {
      throw std::invalid_argument(std::string("Hyperparameters: ") + name +
                                  (strictly_positive ? " must be > 0" : " must be >= 0"));
    }
  };
  check(kappa, "kappa", false);
  check(tau, "tau", false);
  check(nu, "nu", false);
  check(lambda, "lambda", false);
  check(eta, "eta", true);
}

TrainingData TrainingData::from_graphs(GraphSequence g, const FeatureMapConfig& cfg) {
  TrainingData data{std::move(g), {}, {}, {}};
  data.map = build_feature_map(data.graphs, cfg);
  data.features = apply_feature_map(data.graphs, data.map);
  data.descriptors = build_descriptors(data.features);
  return data;
}

void TrainingData::validate() const {
  const Index n = graphs.node_count();
  const Index t_count = graphs.horizon();
  if (features.horizon() != t_count || descriptors.horizon() != t_count) {
    throw DimensionError("TrainingData: feature/descriptor horizon differs from graph horizon");
  }
  if (features.node_count() != n || map.node_count() != n) {
    throw DimensionError("TrainingData: node counts differ");
  }
  if (map.dim() != features.dim() || descriptors.dim() != 3 * features.dim()) {
    throw DimensionError("TrainingData: feature dimensions are inconsistent");
  }
}

Matrix predict(const PredictorTensor& w, const Matrix& phi) {
  const Index n = w.node_count();
  if (phi.rows() != n || phi.cols() != w.input_dim()) {
    throw DimensionError("predict: descriptor is " + std::to_string(phi.rows()) + "x" +
                         std::to_string(phi.cols()) + ", predictor wants " + std::to_string(n) +
                         "x" + std::to_string(w.input_dim()));
  }
  Matrix out(n, w.output_dim());
  for (Index i = 0; i < n; ++i) {
    out.row(i) = phi.row(i) * w.blocks[static_cast<std::size_t>(i)];
  }
  return out;
}

double squared_loss(const Matrix& prediction, const Matrix& target) {
  require_same_shape(prediction, target, "squared_loss");
  return (prediction - target).squaredNorm();
}

SymNonNegMatrix pairwise_dist(const PredictorTensor& w) {
  const Index n = w.node_count();
  const Matrix stacked = stack_blocks(w);
  const Matrix gram = stacked.transpose() * stacked;
  Matrix dist(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      dist(i, j) = std::max(0.0, gram(i, i) + gram(j, j) - gram(i, j) - gram(j, i));
    }
    dist(j, j) = 0.0;
  }
  // exact symmetry despite floating-point accumulation order
  dist = 0.5 * (dist + dist.transpose()).eval();
  return SymNonNegMatrix::trusted(std::move(dist));
}

double laplacian_coupling(const PredictorTensor& w, const Matrix& s) {
  if (s.rows() != w.node_count() || s.cols() != w.node_count()) {
    throw DimensionError("laplacian_coupling: S must be n x n");
  }
  const SymNonNegMatrix dist = pairwise_dist(w);
  return (s.array() * dist.matrix().array()).sum();
}

ObjectiveBreakdown evaluate(const ModelState& state, const TrainingData& data,
                            const Hyperparameters& h) {
  check_dims(state, data, "evaluate");
  const Index t_count = data.horizon();

  ObjectiveBreakdown out;
  for (Index t = 0; t + 1 < t_count; ++t) {
    out.j1_fit += squared_loss(predict(state.w, data.descriptors.frames[static_cast<std::size_t>(t)]),
                               data.features.frames[static_cast<std::size_t>(t + 1)]);
  }
  out.j1_ridge = 0.5 * h.kappa * state.w.squared_norm();
  out.j2_nuclear = h.tau == 0.0 ? 0.0 : h.tau * smoothed_nuclear(state.s, h.eta);
  out.j2_prox = 0.5 * h.nu * (state.s - data.graphs.last()).squaredNorm();
  out.j3_coupling = squared_loss(predict(state.w, data.descriptors.frames.back()),
                                 state.s * data.map.omega);
  out.j4_laplacian = h.lambda == 0.0 ? 0.0 : h.lambda * laplacian_coupling(state.w, state.s);
  out.total = out.j1_fit + out.j1_ridge + out.j2_nuclear + out.j2_prox + out.j3_coupling +
              out.j4_laplacian;
  return out;
}

Gradient gradient(const ModelState& state, const TrainingData& data,
                  const Hyperparameters& h) {
  check_dims(state, data, "gradient");
  const Index n = data.node_count();
  const Index t_count = data.horizon();

  Gradient g;
  g.w = PredictorTensor::zero(n, state.w.input_dim(), state.w.output_dim());

  // J1 fit: sum_t 2 phi_t^T (phi_t W - X_{t+1}) per node
  for (Index t = 0; t + 1 < t_count; ++t) {
    const Matrix& phi = data.descriptors.frames[static_cast<std::size_t>(t)];
    const Matrix& target = data.features.frames[static_cast<std::size_t>(t + 1)];
    for (Index i = 0; i < n; ++i) {
      const auto row = phi.row(i);
      g.w.blocks[static_cast<std::size_t>(i)].noalias() +=
          2.0 * row.transpose() * (row * state.w.blocks[static_cast<std::size_t>(i)] - target.row(i));
    }
  }

  // J3: graph-feature consistency at the final time
  const Matrix& phi_last = data.descriptors.frames.back();
  const Matrix s_omega = state.s * data.map.omega;
  Matrix residual_last(n, state.w.output_dim());
  for (Index i = 0; i < n; ++i) {
    const auto row = phi_last.row(i);
    residual_last.row(i) = row * state.w.blocks[static_cast<std::size_t>(i)] - s_omega.row(i);
    g.w.blocks[static_cast<std::size_t>(i)].noalias() +=
        2.0 * row.transpose() * residual_last.row(i);
  }

  // J1 ridge
  for (Index i = 0; i < n; ++i) {
    g.w.blocks[static_cast<std::size_t>(i)] += h.kappa * state.w.blocks[static_cast<std::size_t>(i)];
  }

  // J4 on W: 4 lambda sum_j Lambda(S)_ij W_j, with Lambda built from the
  // symmetric part of S so the formula stays the exact gradient when S is
  // slightly asymmetric (Tr(S^T Delta) only sees the symmetric part).
  if (h.lambda != 0.0) {
    const Matrix s_sym = 0.5 * (state.s + state.s.transpose());
    Matrix lap = -s_sym;
    lap.diagonal() += s_sym.rowwise().sum();
    const Matrix stacked = stack_blocks(state.w);   // (d*q) x n
    const Matrix coupled = stacked * lap;           // column i = sum_j Lambda_ij vec(W_j)
    const Index d = state.w.input_dim();
    const Index q = state.w.output_dim();
    for (Index i = 0; i < n; ++i) {
      g.w.blocks[static_cast<std::size_t>(i)] +=
          4.0 * h.lambda * Eigen::Map<const Matrix>(coupled.col(i).data(), d, q);
    }
  }

  // S block
  g.s = 2.0 * (-residual_last) * data.map.omega.transpose();  // d/dS of ||S Omega - P||^2
  if (h.lambda != 0.0) {
    g.s += h.lambda * pairwise_dist(state.w).matrix();
  }
  g.s += h.nu * (state.s - data.graphs.last());
  if (h.tau != 0.0) {
    g.s += h.tau * smoothed_nuclear_grad(state.s, h.eta);
  }
  return g;
}

}  // namespace dygraf
