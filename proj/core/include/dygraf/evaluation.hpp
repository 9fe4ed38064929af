#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dygraf/baselines.hpp"
#include "dygraf/objective.hpp"
#include "dygraf/optimizer.hpp"
#include "dygraf/synthetic.hpp"

namespace dygraf {

/// Relative Frobenius errors of the two predictions. A missing prediction
/// leaves its metric absent; a zero-norm truth marks the metric undefined
/// instead of dividing by zero.
struct MetricPair {
  std::optional<double> feature_error;
  std::optional<double> graph_error;
  bool feature_undefined = false;
  bool graph_undefined = false;
};

MetricPair relative_errors(const std::optional<Matrix>& predicted_features,
                           const std::optional<Matrix>& predicted_graph,
                           const Matrix& features_truth, const Matrix& graph_truth);

struct CvGrid {
  std::vector<double> kappa;
  std::vector<double> mu;
  std::vector<double> nu;
  std::vector<double> lambda;
  enum class Objective { Feature, Graph, Sum };
  Objective objective = Objective::Sum;

  static CvGrid defaults();
};

/// Expanding-window validation times: the last ceil(20%) of the horizon,
/// skipping times whose training window would be shorter than 3 steps.
std::vector<Index> cv_validation_times(Index horizon);

struct CvPoint {
  double value = 0.0;
  double mean_error = 0.0;
};

struct CvStage2Point {
  double nu = 0.0;
  double lambda = 0.0;
  double feature_error = 0.0;
  double graph_error = 0.0;
};

struct CvResult {
  double kappa_cv = 0.0;
  double mu_cv = 0.0;
  std::vector<CvPoint> kappa_surface;
  std::vector<CvPoint> mu_surface;
  std::vector<Index> validation_times;
  std::optional<std::pair<double, double>> nu_lambda_cv;
  std::vector<CvStage2Point> stage2_surface;
};

struct CvStage2Config {
  Hyperparameters base;   // eta is taken from here; kappa and tau are overridden
  OptimizerConfig opt;
};

/// Stage 1 picks kappa by validation feature error of the ridge predictor
/// alone and mu by validation graph error of shrinkage alone. When stage2 is
/// given, a (nu, lambda) grid search runs joint fits with tau = nu * mu_cv.
CvResult cross_validate(const GraphSequence& training, const CvGrid& grid,
                        const FeatureMapConfig& fmap, const CvStage2Config* stage2 = nullptr);

enum class Method { Hybrid, LambdaZero, RankFree, RegressionOnly, GraphOnly };

std::string method_name(Method m);
std::vector<Method> all_methods();

struct TableProtocol {
  FeatureMapConfig fmap;
  CvGrid grid = CvGrid::defaults();
  double nu = 1.0;
  double lambda = 0.01;
  double eta = 1e-3;
  OptimizerConfig opt;
  /// When false, fixed_kappa and fixed_mu replace the per-replication CV.
  bool cv_per_replication = true;
  double fixed_kappa = 1.0;
  double fixed_mu = 0.1;
  /// Explicit generator seeds; defaults to cfg.seed, cfg.seed + 1, ...
  std::optional<std::vector<std::uint64_t>> seeds;
};

struct SeedRecord {
  std::uint64_t seed = 0;
  Method method = Method::Hybrid;
  std::optional<double> feature_error;
  std::optional<double> graph_error;
};

struct TableRow {
  Method method = Method::Hybrid;
  std::optional<double> feature_mean, feature_std, feature_stderr;
  std::optional<double> graph_mean, graph_std, graph_stderr;
};

struct BootstrapTable {
  std::vector<TableRow> rows;
  std::vector<SeedRecord> records;
};

/// Generates `replications` independent datasets of cfg.T + 1 snapshots,
/// trains every method on the first cfg.T and scores predictions of step
/// cfg.T + 1. Reports mean, standard deviation and standard error per
/// method and metric.
BootstrapTable bootstrap_table(const std::vector<Method>& methods, const GeneratorConfig& cfg,
                               int replications, const TableProtocol& protocol);

}  // namespace dygraf
