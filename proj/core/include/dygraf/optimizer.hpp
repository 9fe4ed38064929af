#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dygraf/objective.hpp"

namespace dygraf {

/// Radius of the Frobenius ball on W inside which the coupled quadratic part
/// of the objective is convex: sqrt(nu * kappa) / (2 lambda (sqrt(n) + 1)).
/// All three weights must be strictly positive.
double convexity_radius(const Hyperparameters& h, Index n);

/// Feasible region of the projected descent: S symmetric nonnegative, and
/// ||W||_F <= w_radius when the radius is defined. When kappa, nu or lambda
/// is zero the radius degenerates and only the S constraint applies.
struct ConstraintSet {
  Index n = 0;
  std::optional<double> w_radius;

  static ConstraintSet from(const Hyperparameters& h, Index n);
  bool contains(const ModelState& state, double tol = 1e-12) const;
};

ModelState project(ModelState state, const ConstraintSet& constraints);

struct OptimizerConfig {
  double step_size = 1.0;          // initial backtracking step
  int max_iters = 5000;
  double grad_tolerance = 1e-6;    // stop when ||grad|| <= tol * (1 + |L|)
  double backtrack_factor = 0.5;   // beta in (0,1)
  double sufficient_decrease = 1e-4;  // c in (0,1)
  double min_step = 1e-18;         // below this the line search reports a stall

  void validate() const;
};

enum class TerminationReason { GradientTolerance, MaxIterations, Stalled };

enum class FitPhase { Joint = 0, PredictorOnly = 1, GraphOnly = 2 };

struct TraceRecord {
  int iteration = 0;
  ObjectiveBreakdown objective;   // at the point reached by this iteration
  double grad_norm = 0.0;         // at the point the step started from
  double step_size = 0.0;
  bool accepted = true;
  int rejected_trials = 0;
  FitPhase phase = FitPhase::Joint;
  double w_norm = 0.0;            // membership diagnostics for the iterate
  double s_min_entry = 0.0;
  std::optional<double> val_feature_error;
  std::optional<double> val_graph_error;
};

struct Trace {
  std::vector<TraceRecord> records;
  TerminationReason reason = TerminationReason::MaxIterations;
};

struct FitResult {
  ModelState state;
  Trace trace;
};

/// Held-out targets; when provided, per-iteration validation errors are
/// recorded in the trace.
struct HoldOut {
  Matrix next_features;  // X_{T+1}
  Matrix next_graph;     // A_{T+1}
};

/// W = 0, S = A_T: the minimizer of the coupled quadratic part, inside the
/// constraint set.
ModelState initial_state(const TrainingData& data);

/// Projected gradient descent on the joint objective with monotone
/// backtracking line search. In the degenerate case tau == 0 and lambda == 0
/// the objective's only W-S link is the final-time consistency term and the
/// solve decouples: W is the ridge minimizer of the prediction term and S is
/// found by projected descent on the remaining graph terms at that W.
FitResult fit(ModelState initial, const TrainingData& data, const Hyperparameters& h,
              const OptimizerConfig& cfg, const HoldOut* validation = nullptr);

struct ConvexityReport {
  int samples_inside = 0;
  double min_curvature_inside = 0.0;
  int violations_inside = 0;        // curvature below -1e-8 inside E
  int samples_outside = 0;
  double min_curvature_outside = 0.0;
  bool negative_curvature_outside = false;
};

/// Samples points of E and random directions and measures second-order
/// directional differences of the coupled quadratic Psi. Also probes far
/// outside the W-ball, where negative curvature may exist. With lambda == 0
/// Psi is a plain positive quadratic: the W-ball disappears, predictors are
/// sampled at unit scale and the outside probe is skipped.
ConvexityReport check_convexity(const Hyperparameters& h, Index n, int samples,
                                std::uint64_t seed = 7, Index d = 3, Index q = 2);

}  // namespace dygraf
