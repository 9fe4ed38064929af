#include "dygraf/synthetic.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "dygraf/errors.hpp"
#include "dygraf/matrix_ops.hpp"
#include "dygraf/rng.hpp"

namespace dygraf {

void GeneratorConfig::validate() const {
  if (n < 1 || r < 1 || T < 1) {
    throw std::invalid_argument("GeneratorConfig: n, r, T must be >= 1");
  }
  if (delta < 0.0 || sigma_noise < 0.0 || epsilon < 0.0) {
    throw std::invalid_argument("GeneratorConfig: noise and drift strengths must be >= 0");
  }
  if (!(sigma1 > 0.0) || !(sigma2 > 0.0)) {
    throw std::invalid_argument("GeneratorConfig: drift length-scales must be > 0");
  }
  for (const auto& anchor : {v1, v2}) {
    if (anchor) {
      if (anchor->size() != r) {
        throw DimensionError("GeneratorConfig: drift anchors must have dimension r");
      }
      if ((anchor->array() < 0.0).any()) {
        throw std::invalid_argument("GeneratorConfig: drift anchors must be entrywise >= 0");
      }
    }
  }
}

Vector drift(const Vector& x, const GeneratorConfig& cfg) {
  if (cfg.v1.has_value() != cfg.v2.has_value() || !cfg.v1.has_value()) {
    throw std::invalid_argument("drift: both anchors must be set");
  }
  cfg.validate();
  if (x.size() != cfg.r) {
    throw DimensionError("drift: x must have dimension r");
  }
  const Vector d1 = x - *cfg.v1;
  const Vector d2 = x - *cfg.v2;
  const double w1 = std::exp(-d1.squaredNorm() / (cfg.sigma1 * cfg.sigma1));
  const double w2 = cfg.symmetric_drift
                        ? std::exp(-d2.squaredNorm() / (cfg.sigma2 * cfg.sigma2))
                        : std::exp(-d2.norm() / cfg.sigma2);
  return cfg.epsilon * (w1 * d1 + w2 * d2);
}

namespace {

Matrix fill_uniform(Rng& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.uniform();
  }
  return m;
}

Matrix fill_gaussian(Rng& rng, Index rows, Index cols, double std_dev) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = std_dev * rng.gaussian();
  }
  return m;
}

}  // namespace

SyntheticData generate(const GeneratorConfig& raw_cfg) {
  raw_cfg.validate();
  GeneratorConfig cfg = raw_cfg;
  Rng rng(cfg.seed);

  // draw order is fixed: anchors, initial factors, then per step the factor
  // noise for U, for V, and the edge noise, all row-major
  if (!cfg.v1) cfg.v1 = fill_uniform(rng, cfg.r, 1).col(0);
  if (!cfg.v2) cfg.v2 = fill_uniform(rng, cfg.r, 1).col(0);

  LatentTrace latents;
  latents.u.reserve(static_cast<std::size_t>(cfg.T) + 1);
  latents.v.reserve(static_cast<std::size_t>(cfg.T) + 1);
  latents.u.push_back(fill_uniform(rng, cfg.n, cfg.r));
  latents.v.push_back(fill_uniform(rng, cfg.n, cfg.r));

  std::vector<SymNonNegMatrix> snapshots;
  snapshots.reserve(static_cast<std::size_t>(cfg.T));

  for (Index t = 1; t <= cfg.T; ++t) {
    const Matrix& u_prev = latents.u.back();
    const Matrix& v_prev = latents.v.back();
    Matrix u_next(cfg.n, cfg.r);
    Matrix v_next(cfg.n, cfg.r);
    const Matrix u_noise = fill_gaussian(rng, cfg.n, cfg.r, cfg.delta);
    const Matrix v_noise = fill_gaussian(rng, cfg.n, cfg.r, cfg.delta);
    for (Index i = 0; i < cfg.n; ++i) {
      u_next.row(i) =
          u_prev.row(i) + drift(u_prev.row(i).transpose(), cfg).transpose() + u_noise.row(i);
      v_next.row(i) =
          v_prev.row(i) + drift(v_prev.row(i).transpose(), cfg).transpose() + v_noise.row(i);
    }
    latents.u.push_back(std::move(u_next));
    latents.v.push_back(std::move(v_next));

    Matrix a = latents.u.back() * latents.v.back().transpose();
    if (cfg.sigma_noise > 0.0) {
      a += fill_gaussian(rng, cfg.n, cfg.n, cfg.sigma_noise);
    }
    if (cfg.project_snapshots) {
      a = project_sym_nonneg(a).matrix();
    }
    if (cfg.enforce_monotone && !snapshots.empty()) {
      a = a.cwiseMax(snapshots.back().matrix());
    }
    if (cfg.project_snapshots) {
      snapshots.push_back(SymNonNegMatrix::trusted(std::move(a)));
    } else {
      // without projection the raw snapshot must already satisfy the
      // invariants; the validating constructor reports it if not
      snapshots.emplace_back(std::move(a));
    }
  }

  const bool monotone = cfg.enforce_monotone;
  return SyntheticData{GraphSequence(std::move(snapshots), monotone), std::move(latents),
                       *cfg.v1, *cfg.v2};
}

}  // namespace dygraf
