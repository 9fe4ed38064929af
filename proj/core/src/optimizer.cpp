#include "dygraf/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "dygraf/baselines.hpp"
#include "dygraf/errors.hpp"
#include "dygraf/rng.hpp"

namespace dygraf {

namespace {

void record_validation(TraceRecord& rec, const ModelState& state, const TrainingData& data,
                       const HoldOut* validation) {
  rec.w_norm = state.w.norm();
  rec.s_min_entry = state.s.size() == 0 ? 0.0 : state.s.minCoeff();
  if (validation == nullptr) return;
  const Matrix prediction = predict(state.w, data.descriptors.frames.back());
  const double fn = validation->next_features.norm();
  const double gn = validation->next_graph.norm();
  if (fn > 0.0) rec.val_feature_error = (validation->next_features - prediction).norm() / fn;
  if (gn > 0.0) rec.val_graph_error = (validation->next_graph - state.s).norm() / gn;
}

ModelState step_from(const ModelState& state, const Gradient& g, double step) {
  ModelState next;
  next.w = state.w;
  for (std::size_t i = 0; i < next.w.blocks.size(); ++i) {
    next.w.blocks[i] -= step * g.w.blocks[i];
  }
  next.s = state.s - step * g.s;
  return next;
}

/// Gradient of the objective restricted to the symmetric S-subspace every
/// projected iterate lives in. The antisymmetric part of the ambient
/// S-gradient is annihilated by the projection, so using it in the line
/// search and stopping rule would demand progress no feasible step can make;
/// the projected iterate map itself is unchanged.
Gradient reduced_gradient(const ModelState& state, const TrainingData& data,
                          const Hyperparameters& h) {
  Gradient g = gradient(state, data, h);
  g.s = 0.5 * (g.s + g.s.transpose()).eval();
  return g;
}

bool negligible_decrease(double before, double after) {
  return before - after <= 1e-15 * (1.0 + std::abs(before));
}

/// Minimizes loss(P, S Omega) + nu/2 ||S - A_T||^2 over symmetric nonnegative
/// S by projected gradient descent with backtracking; appends one trace row
/// per iteration with the full objective breakdown.
TerminationReason descend_graph_block(ModelState& state, const TrainingData& data,
                                      const Hyperparameters& h, const OptimizerConfig& cfg,
                                      const HoldOut* validation, Trace& trace,
                                      int& iteration) {
  const Matrix& omega = data.map.omega;
  const Matrix& a_last = data.graphs.last();
  const Matrix prediction = predict(state.w, data.descriptors.frames.back());

  auto value = [&](const Matrix& s) {
    return (s * omega - prediction).squaredNorm() + 0.5 * h.nu * (s - a_last).squaredNorm();
  };
  auto grad = [&](const Matrix& s) -> Matrix {
    const Matrix g = 2.0 * (s * omega - prediction) * omega.transpose() + h.nu * (s - a_last);
    return 0.5 * (g + g.transpose());  // restriction to the symmetric subspace
  };

  double current = value(state.s);
  double step = cfg.step_size;
  for (int k = 0; k < cfg.max_iters; ++k, ++iteration) {
    if (!std::isfinite(current)) {
      throw NumericError("fit: non-finite objective at iteration " + std::to_string(iteration));
    }
    const Matrix g = grad(state.s);
    if (!g.allFinite()) {
      throw NumericError("fit: non-finite gradient at iteration " + std::to_string(iteration));
    }
    const double gnorm = g.norm();
    if (gnorm <= cfg.grad_tolerance * (1.0 + std::abs(current))) {
      return TerminationReason::GradientTolerance;
    }

    step = std::min(cfg.step_size, step / cfg.backtrack_factor);
    int rejected = 0;
    bool accepted = false;
    Matrix trial;
    double trial_value = 0.0;
    while (step >= cfg.min_step) {
      trial = project_sym_nonneg(state.s - step * g).matrix();
      trial_value = value(trial);
      if (trial_value <= current - cfg.sufficient_decrease * step * gnorm * gnorm) {
        accepted = true;
        break;
      }
      ++rejected;
      step *= cfg.backtrack_factor;
    }
    if (!accepted) return TerminationReason::Stalled;
    const bool stalling = negligible_decrease(current, trial_value);

    state.s = std::move(trial);
    current = trial_value;

    TraceRecord rec;
    rec.iteration = iteration + 1;
    rec.objective = evaluate(state, data, h);
    rec.grad_norm = gnorm;
    rec.step_size = step;
    rec.rejected_trials = rejected;
    rec.phase = FitPhase::GraphOnly;
    record_validation(rec, state, data, validation);
    trace.records.push_back(std::move(rec));
    if (stalling) return TerminationReason::Stalled;
  }
  return TerminationReason::MaxIterations;
}

/// tau == 0 and lambda == 0: the predictor block is the ridge minimizer of
/// the prediction term and the graph block solves the remaining terms at
/// that predictor.
FitResult fit_decoupled(ModelState state, const TrainingData& data, const Hyperparameters& h,
                        const OptimizerConfig& cfg, const HoldOut* validation) {
  FitResult result;
  TraceRecord start;
  start.iteration = 0;
  start.objective = evaluate(state, data, h);
  start.grad_norm = reduced_gradient(state, data, h).norm();
  record_validation(start, state, data, validation);
  result.trace.records.push_back(std::move(start));

  state.w = ridge_fit(data.descriptors, data.features, h.kappa);

  TraceRecord after_w;
  after_w.iteration = 1;
  after_w.objective = evaluate(state, data, h);
  after_w.grad_norm = result.trace.records.front().grad_norm;
  after_w.phase = FitPhase::PredictorOnly;
  record_validation(after_w, state, data, validation);
  result.trace.records.push_back(std::move(after_w));

  int iteration = 1;
  result.trace.reason =
      descend_graph_block(state, data, h, cfg, validation, result.trace, iteration);
  result.state = std::move(state);
  return result;
}

}  // namespace

double convexity_radius(const Hyperparameters& h, Index n) {
  auto require_positive = [](double v, const char* name) {
    if (!(v > 0.0)) {
      throw std::invalid_argument(std::string("convexity_radius: ") + name +
                                  " must be > 0, got " + std::to_string(v));
    }
  };
  require_positive(h.nu, "nu");
  require_positive(h.kappa, "kappa");
  require_positive(h.lambda, "lambda");
  if (n < 1) {
    throw std::invalid_argument("convexity_radius: n must be >= 1");
  }
  return std::sqrt(h.nu * h.kappa) / (2.0 * h.lambda * (std::sqrt(static_cast<double>(n)) + 1.0));
}

ConstraintSet ConstraintSet::from(const Hyperparameters& h, Index n) {
  ConstraintSet e;
  e.n = n;
  if (h.nu > 0.0 && h.kappa > 0.0 && h.lambda > 0.0) {
    e.w_radius = convexity_radius(h, n);
  }
  return e;
}

bool ConstraintSet::contains(const ModelState& state, double tol) const {
  if (state.s.rows() != n || state.s.cols() != n) return false;
  if (!is_symmetric(state.s) || !is_nonnegative(state.s)) return false;
  if (w_radius && state.w.norm() > *w_radius + tol) return false;
  return true;
}

ModelState project(ModelState state, const ConstraintSet& constraints) {
  state.s = project_sym_nonneg(state.s).matrix();
  if (constraints.w_radius) {
    const double norm = state.w.norm();
    if (norm > *constraints.w_radius) {
      state.w *= *constraints.w_radius / norm;
    }
  }
  return state;
}

void OptimizerConfig::validate() const {
  if (!(step_size > 0.0)) throw std::invalid_argument("OptimizerConfig: step_size must be > 0");
  if (max_iters < 0) throw std::invalid_argument("OptimizerConfig: max_iters must be >= 0");
  if (!(grad_tolerance > 0.0)) {
    throw std::invalid_argument("OptimizerConfig: grad_tolerance must be > 0");
  }
  if (!(backtrack_factor > 0.0) || !(backtrack_factor < 1.0)) {
    throw std::invalid_argument("OptimizerConfig: backtrack_factor must be in (0,1)");
  }
  if (!(sufficient_decrease > 0.0) || !(sufficient_decrease < 1.0)) {
    throw std::invalid_argument("OptimizerConfig: sufficient_decrease must be in (0,1)");
  }
}

ModelState initial_state(const TrainingData& data) {
  ModelState state;
  state.w = PredictorTensor::zero(data.node_count(), data.descriptors.dim(), data.features.dim());
  state.s = data.graphs.last();
  return state;
}

FitResult fit(ModelState initial, const TrainingData& data, const Hyperparameters& h,
              const OptimizerConfig& cfg, const HoldOut* validation) {
  h.validate();
  cfg.validate();
  data.validate();
  const ConstraintSet constraints = ConstraintSet::from(h, data.node_count());
  ModelState state = project(std::move(initial), constraints);

  if (h.tau == 0.0 && h.lambda == 0.0) {
    return fit_decoupled(std::move(state), data, h, cfg, validation);
  }

  FitResult result;
  ObjectiveBreakdown current = evaluate(state, data, h);
  if (!std::isfinite(current.total)) {
    throw NumericError("fit: non-finite objective at iteration 0");
  }

  TraceRecord start;
  start.iteration = 0;
  start.objective = current;
  record_validation(start, state, data, validation);

  double step = cfg.step_size;
  result.trace.reason = TerminationReason::MaxIterations;
  for (int k = 0; k < cfg.max_iters; ++k) {
    const Gradient g = reduced_gradient(state, data, h);
    if (!g.all_finite()) {
      throw NumericError("fit: non-finite gradient at iteration " + std::to_string(k));
    }
    const double gnorm = g.norm();
    if (k == 0) {
      start.grad_norm = gnorm;
      result.trace.records.push_back(start);
    }
    if (gnorm <= cfg.grad_tolerance * (1.0 + std::abs(current.total))) {
      result.trace.reason = TerminationReason::GradientTolerance;
      break;
    }

    step = std::min(cfg.step_size, step / cfg.backtrack_factor);
    int rejected = 0;
    bool accepted = false;
    ModelState trial;
    ObjectiveBreakdown trial_value;
    while (step >= cfg.min_step) {
      trial = project(step_from(state, g, step), constraints);
      trial_value = evaluate(trial, data, h);
      if (!std::isfinite(trial_value.total)) {
        throw NumericError("fit: non-finite objective at iteration " + std::to_string(k + 1));
      }
      if (trial_value.total <= current.total - cfg.sufficient_decrease * step * gnorm * gnorm) {
        accepted = true;
        break;
      }
      ++rejected;
      step *= cfg.backtrack_factor;
    }
    if (!accepted) {
      result.trace.reason = TerminationReason::Stalled;
      TraceRecord rec;
      rec.iteration = k + 1;
      rec.objective = current;
      rec.grad_norm = gnorm;
      rec.step_size = 0.0;
      rec.accepted = false;
      rec.rejected_trials = rejected;
      record_validation(rec, state, data, validation);
      result.trace.records.push_back(std::move(rec));
      break;
    }

    const bool stalling = negligible_decrease(current.total, trial_value.total);
    state = std::move(trial);
    current = trial_value;

    TraceRecord rec;
    rec.iteration = k + 1;
    rec.objective = current;
    rec.grad_norm = gnorm;
    rec.step_size = step;
    rec.rejected_trials = rejected;
    record_validation(rec, state, data, validation);
    result.trace.records.push_back(std::move(rec));
    if (stalling) {
      result.trace.reason = TerminationReason::Stalled;
      break;
    }
  }

  if (result.trace.records.empty()) {
    // max_iters == 0: report the starting point
    start.grad_norm = reduced_gradient(state, data, h).norm();
    result.trace.records.push_back(start);
  }
  result.state = std::move(state);
  return result;
}

namespace {

Matrix plain_laplacian(const Matrix& s) {
  Matrix lap = -s;
  lap.diagonal() += s.rowwise().sum();
  return lap;
}

/// Psi(S, W) = kappa/2 ||W||^2 + nu/2 ||S - A_T||^2 + lambda Q(W, Lambda(S), W)
double coupled_quadratic(const Matrix& s, const Matrix& stacked_w, const Matrix& a_last,
                         const Hyperparameters& h) {
  const Matrix lap = plain_laplacian(s);
  const Matrix gram = stacked_w.transpose() * stacked_w;
  const double q_form = (lap.array() * gram.array()).sum();
  return 0.5 * h.kappa * stacked_w.squaredNorm() + 0.5 * h.nu * (s - a_last).squaredNorm() +
         h.lambda * q_form;
}

}  // namespace

ConvexityReport check_convexity(const Hyperparameters& h, Index n, int samples,
                                std::uint64_t seed, Index d, Index q) {
  if (!(h.kappa > 0.0) || !(h.nu > 0.0)) {
    throw std::invalid_argument("check_convexity: kappa and nu must be > 0");
  }
  if (h.lambda < 0.0) {
    throw std::invalid_argument("check_convexity: lambda must be >= 0");
  }
  const bool has_ball = h.lambda > 0.0;
  const double radius = has_ball ? convexity_radius(h, n) : 1.0;
  Rng rng(seed);

  auto random_sym_nonneg = [&]() {
    Matrix g(n, n);
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < n; ++i) g(i, j) = std::abs(rng.gaussian());
    }
    return Matrix(0.5 * (g + g.transpose()));
  };
  auto random_sym = [&]() {
    Matrix g(n, n);
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < n; ++i) g(i, j) = rng.gaussian();
    }
    return Matrix(0.5 * (g + g.transpose()));
  };
  auto random_stacked = [&]() {
    Matrix w(d * q, n);
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < d * q; ++i) w(i, j) = rng.gaussian();
    }
    return w;
  };

  const Matrix a_last = random_sym_nonneg();
  const double step = 0.1;  // Psi is cubic along lines, so any step is exact

  ConvexityReport report;
  report.min_curvature_inside = std::numeric_limits<double>::infinity();
  report.min_curvature_outside = std::numeric_limits<double>::infinity();

  auto curvature_at = [&](const Matrix& s, const Matrix& w) {
    Matrix ds = random_sym();
    Matrix dw = random_stacked();
    const double scale = 1.0 / std::sqrt(ds.squaredNorm() + dw.squaredNorm());
    ds *= scale;
    dw *= scale;
    const double plus = coupled_quadratic(s + step * ds, w + step * dw, a_last, h);
    const double minus = coupled_quadratic(s - step * ds, w - step * dw, a_last, h);
    const double center = coupled_quadratic(s, w, a_last, h);
    return (plus - 2.0 * center + minus) / (step * step);
  };

  for (int it = 0; it < samples; ++it) {
    Matrix s = random_sym_nonneg();
    Matrix w = random_stacked();
    w *= rng.uniform() * radius / w.norm();
    const double curv = curvature_at(s, w);
    ++report.samples_inside;
    report.min_curvature_inside = std::min(report.min_curvature_inside, curv);
    if (curv < -1e-8) ++report.violations_inside;
  }

  if (has_ball) {
    for (int it = 0; it < samples; ++it) {
      Matrix s = random_sym_nonneg();
      Matrix w = random_stacked();
      w *= 100.0 * radius / w.norm();
      const double curv = curvature_at(s, w);
      ++report.samples_outside;
      report.min_curvature_outside = std::min(report.min_curvature_outside, curv);
      if (curv < -1e-8) report.negative_curvature_outside = true;
    }
  }
  return report;
}

}  // namespace dygraf
