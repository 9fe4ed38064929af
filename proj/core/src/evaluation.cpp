#include "dygraf/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dygraf/errors.hpp"

namespace dygraf {

namespace {

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(count));
  const double llo = std::log10(lo);
  const double lhi = std::log10(hi);
  for (int i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    grid.push_back(std::pow(10.0, llo + f * (lhi - llo)));
  }
  return grid;
}

struct Fold {
  TrainingData data;   // window 1..t_v - 1
  Matrix features_truth;  // A_{t_v} * Omega_fold
  const Matrix* graph_truth = nullptr;  // A_{t_v}
};

std::vector<Fold> build_folds(const GraphSequence& training, const FeatureMapConfig& fmap,
                              const std::vector<Index>& times) {
  std::vector<Fold> folds;
  folds.reserve(times.size());
  for (Index t_v : times) {
    Fold fold{TrainingData::from_graphs(training.prefix(t_v - 1), fmap), {}, nullptr};
    fold.graph_truth = &training.at(t_v);
    fold.features_truth = *fold.graph_truth * fold.data.map.omega;
    folds.push_back(std::move(fold));
  }
  return folds;
}

double require_error(const std::optional<double>& err, const char* what) {
  if (!err) throw NumericError(std::string("cross_validate: ") + what + " is undefined");
  return *err;
}

}  // namespace

MetricPair relative_errors(const std::optional<Matrix>& predicted_features,
                           const std::optional<Matrix>& predicted_graph,
                           const Matrix& features_truth, const Matrix& graph_truth) {
  MetricPair out;
  if (predicted_features) {
    if (predicted_features->rows() != features_truth.rows() ||
        predicted_features->cols() != features_truth.cols()) {
      throw DimensionError("relative_errors: feature prediction shape differs from truth");
    }
    const double norm = features_truth.norm();
    if (norm == 0.0) {
      out.feature_undefined = true;
    } else {
      out.feature_error = (features_truth - *predicted_features).norm() / norm;
    }
  }
  if (predicted_graph) {
    if (predicted_graph->rows() != graph_truth.rows() ||
        predicted_graph->cols() != graph_truth.cols()) {
      throw DimensionError("relative_errors: graph prediction shape differs from truth");
    }
    const double norm = graph_truth.norm();
    if (norm == 0.0) {
      out.graph_undefined = true;
    } else {
      out.graph_error = (graph_truth - *predicted_graph).norm() / norm;
    }
  }
  return out;
}

CvGrid CvGrid::defaults() {
  CvGrid grid;
  grid.kappa = log_grid(1e-3, 1e1, 7);
  grid.mu = log_grid(1e-3, 1e1, 7);
  grid.nu = log_grid(1e-2, 1e1, 5);
  grid.lambda = log_grid(1e-2, 1e1, 5);
  return grid;
}

std::vector<Index> cv_validation_times(Index horizon) {
  const Index span = (horizon + 4) / 5;  // ceil(20%)
  std::vector<Index> times;
  for (Index t_v = horizon - span + 1; t_v <= horizon; ++t_v) {
    if (t_v - 1 >= 3) times.push_back(t_v);
  }
  return times;
}

CvResult cross_validate(const GraphSequence& training, const CvGrid& grid,
                        const FeatureMapConfig& fmap, const CvStage2Config* stage2) {
  if (grid.kappa.empty() || grid.mu.empty()) {
    throw std::invalid_argument("cross_validate: stage-1 grids must be nonempty");
  }
  CvResult result;
  result.validation_times = cv_validation_times(training.horizon());
  if (result.validation_times.empty()) {
    throw DimensionError("cross_validate: empty usable window (horizon " +
                         std::to_string(training.horizon()) + " leaves no validation times)");
  }
  const std::vector<Fold> folds = build_folds(training, fmap, result.validation_times);

  std::vector<double> kappa_grid = grid.kappa;
  std::sort(kappa_grid.begin(), kappa_grid.end());
  double best_err = std::numeric_limits<double>::infinity();
  for (double kappa : kappa_grid) {
    double total = 0.0;
    for (const Fold& fold : folds) {
      const PredictorTensor w = ridge_fit(fold.data.descriptors, fold.data.features, kappa);
      const Matrix prediction = predict(w, fold.data.descriptors.frames.back());
      const MetricPair m =
          relative_errors(prediction, std::nullopt, fold.features_truth, *fold.graph_truth);
      total += require_error(m.feature_error, "validation feature error");
    }
    const double mean = total / static_cast<double>(folds.size());
    result.kappa_surface.push_back({kappa, mean});
    if (mean < best_err) {
      best_err = mean;
      result.kappa_cv = kappa;
    }
  }

  std::vector<double> mu_grid = grid.mu;
  std::sort(mu_grid.begin(), mu_grid.end());
  best_err = std::numeric_limits<double>::infinity();
  for (double mu : mu_grid) {
    double total = 0.0;
    for (const Fold& fold : folds) {
      const Matrix s = shrink(fold.data.graphs.last(), mu);
      const MetricPair m = relative_errors(std::nullopt, s, fold.features_truth, *fold.graph_truth);
      total += require_error(m.graph_error, "validation graph error");
    }
    const double mean = total / static_cast<double>(folds.size());
    result.mu_surface.push_back({mu, mean});
    if (mean < best_err) {
      best_err = mean;
      result.mu_cv = mu;
    }
  }

  if (stage2 != nullptr) {
    if (grid.nu.empty() || grid.lambda.empty()) {
      throw std::invalid_argument("cross_validate: stage-2 grids must be nonempty");
    }
    best_err = std::numeric_limits<double>::infinity();
    for (double nu : grid.nu) {
      for (double lambda : grid.lambda) {
        Hyperparameters h = stage2->base;
        h.kappa = result.kappa_cv;
        h.nu = nu;
        h.lambda = lambda;
        h.tau = nu * result.mu_cv;
        double feature_total = 0.0;
        double graph_total = 0.0;
        for (const Fold& fold : folds) {
          const FitResult fitted = fit(initial_state(fold.data), fold.data, h, stage2->opt);
          const Matrix prediction =
              predict(fitted.state.w, fold.data.descriptors.frames.back());
          const MetricPair m = relative_errors(prediction, fitted.state.s, fold.features_truth,
                                               *fold.graph_truth);
          feature_total += require_error(m.feature_error, "validation feature error");
          graph_total += require_error(m.graph_error, "validation graph error");
        }
        const double feature_mean = feature_total / static_cast<double>(folds.size());
        const double graph_mean = graph_total / static_cast<double>(folds.size());
        result.stage2_surface.push_back({nu, lambda, feature_mean, graph_mean});
        double score = 0.0;
        switch (grid.objective) {
          case CvGrid::Objective::Feature: score = feature_mean; break;
          case CvGrid::Objective::Graph: score = graph_mean; break;
          case CvGrid::Objective::Sum: score = feature_mean + graph_mean; break;
        }
        if (score < best_err) {
          best_err = score;
          result.nu_lambda_cv = std::make_pair(nu, lambda);
        }
      }
    }
  }
  return result;
}

std::string method_name(Method m) {
  switch (m) {
    case Method::Hybrid: return "hybrid";
    case Method::LambdaZero: return "lambda0";
    case Method::RankFree: return "rankfree";
    case Method::RegressionOnly: return "regression_only";
    case Method::GraphOnly: return "graph_only";
  }
  return "unknown";
}

std::vector<Method> all_methods() {
  return {Method::Hybrid, Method::LambdaZero, Method::RankFree, Method::RegressionOnly,
          Method::GraphOnly};
}

namespace {

struct Aggregate {
  std::vector<double> values;

  void add(const std::optional<double>& v) {
    if (v) values.push_back(*v);
  }
  std::optional<double> mean() const {
    if (values.empty()) return std::nullopt;
    double total = 0.0;
    for (double v : values) total += v;
    return total / static_cast<double>(values.size());
  }
  std::optional<double> stddev() const {
    if (values.size() < 2) return values.empty() ? std::nullopt : std::optional<double>(0.0);
    const double m = *mean();
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  std::optional<double> stderror() const {
    auto sd = stddev();
    if (!sd) return std::nullopt;
    return *sd / std::sqrt(static_cast<double>(values.size()));
  }
};

}  // namespace

BootstrapTable bootstrap_table(const std::vector<Method>& methods, const GeneratorConfig& cfg,
                               int replications, const TableProtocol& protocol) {
  if (replications < 2) {
    throw std::invalid_argument("bootstrap_table: replications must be >= 2");
  }
  std::vector<std::uint64_t> seeds;
  if (protocol.seeds) {
    seeds = *protocol.seeds;
    if (static_cast<int>(seeds.size()) != replications) {
      throw std::invalid_argument("bootstrap_table: seed list length differs from replications");
    }
  } else {
    for (int i = 0; i < replications; ++i) seeds.push_back(cfg.seed + static_cast<std::uint64_t>(i));
  }

  BootstrapTable table;
  std::vector<Aggregate> feature_agg(methods.size());
  std::vector<Aggregate> graph_agg(methods.size());

  for (std::uint64_t seed : seeds) {
    GeneratorConfig gen = cfg;
    gen.T = cfg.T + 1;
    gen.seed = seed;
    const SyntheticData synthetic = generate(gen);
    const GraphSequence training = synthetic.graphs.prefix(cfg.T);
    const TrainingData data = TrainingData::from_graphs(training, protocol.fmap);
    const Matrix& graph_truth = synthetic.graphs.at(cfg.T + 1);
    const Matrix features_truth = graph_truth * data.map.omega;

    double kappa = protocol.fixed_kappa;
    double mu = protocol.fixed_mu;
    if (protocol.cv_per_replication) {
      const CvResult cv = cross_validate(training, protocol.grid, protocol.fmap);
      kappa = cv.kappa_cv;
      mu = cv.mu_cv;
    }

    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      const Method method = methods[mi];
      std::optional<Matrix> predicted_features;
      std::optional<Matrix> predicted_graph;
      switch (method) {
        case Method::RegressionOnly: {
          const PredictorTensor w = ridge_fit(data.descriptors, data.features, kappa);
          predicted_features = predict(w, data.descriptors.frames.back());
          break;
        }
        case Method::GraphOnly: {
          predicted_graph = shrinkage_only(training.snapshots().back(), mu);
          break;
        }
        case Method::Hybrid:
        case Method::LambdaZero:
        case Method::RankFree: {
          Hyperparameters h;
          h.kappa = kappa;
          h.nu = protocol.nu;
          h.lambda = method == Method::LambdaZero ? 0.0 : protocol.lambda;
          h.tau = method == Method::RankFree ? 0.0 : protocol.nu * mu;
          h.eta = protocol.eta;
          const FitResult fitted = fit(initial_state(data), data, h, protocol.opt);
          predicted_features = predict(fitted.state.w, data.descriptors.frames.back());
          predicted_graph = fitted.state.s;
          break;
        }
      }
      const MetricPair m =
          relative_errors(predicted_features, predicted_graph, features_truth, graph_truth);
      table.records.push_back({seed, method, m.feature_error, m.graph_error});
      feature_agg[mi].add(m.feature_error);
      graph_agg[mi].add(m.graph_error);
    }
  }

  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    TableRow row;
    row.method = methods[mi];
    row.feature_mean = feature_agg[mi].mean();
    row.feature_std = feature_agg[mi].stddev();
    row.feature_stderr = feature_agg[mi].stderror();
    row.graph_mean = graph_agg[mi].mean();
    row.graph_std = graph_agg[mi].stddev();
    row.graph_stderr = graph_agg[mi].stderror();
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace dygraf
