#include <cmath>

#include "doctest.h"
#include "dygraf/errors.hpp"
#include "dygraf/matrix_ops.hpp"
#include "dygraf/rng.hpp"
#include "dygraf/synthetic.hpp"

using namespace dygraf;

TEST_CASE("drift vanishes at the anchors and with zero strength") {
  GeneratorConfig cfg;
  cfg.r = 3;
  cfg.epsilon = 1.0;
  Vector anchor(3);
  anchor << 0.2, 0.5, 0.8;
  cfg.v1 = anchor;
  cfg.v2 = anchor;
  CHECK(drift(anchor, cfg).norm() == 0.0);

  cfg.epsilon = 0.0;
  Vector x(3);
  x << 1.0, 2.0, 3.0;
  CHECK(drift(x, cfg).norm() == 0.0);
}

TEST_CASE("drift decays far from both anchors") {
  GeneratorConfig cfg;
  cfg.r = 2;
  cfg.epsilon = 1.0;
  cfg.sigma1 = 1.0;
  cfg.sigma2 = 1.0;
  Vector zero = Vector::Zero(2);
  cfg.v1 = zero;
  cfg.v2 = zero;
  Vector far(2);
  far << 100.0 / std::sqrt(2.0), 100.0 / std::sqrt(2.0);  // distance 100
  CHECK(drift(far, cfg).norm() <= 1e-6);
}

TEST_CASE("drift asymmetry between the two terms") {
  // at distance 2 with unit length-scales the first weight is exp(-4), the
  // second exp(-2); with symmetric_drift both become exp(-4)
  GeneratorConfig cfg;
  cfg.r = 1;
  cfg.epsilon = 1.0;
  Vector zero = Vector::Zero(1);
  Vector x(1);
  x << 2.0;

  cfg.v1 = zero;
  cfg.v2 = Vector(x);  // x == v2, second term vanishes
  const double first_only = drift(x, cfg)(0);
  CHECK(first_only == doctest::Approx(std::exp(-4.0) * 2.0).epsilon(1e-12));

  cfg.v1 = Vector(x);  // x == v1, first term vanishes
  cfg.v2 = zero;
  const double second_only = drift(x, cfg)(0);
  CHECK(second_only == doctest::Approx(std::exp(-2.0) * 2.0).epsilon(1e-12));

  cfg.symmetric_drift = true;
  CHECK(drift(x, cfg)(0) == doctest::Approx(std::exp(-4.0) * 2.0).epsilon(1e-12));
}

TEST_CASE("frozen dynamics give constant snapshots with bounded rank") {
  GeneratorConfig cfg;
  cfg.n = 12;
  cfg.r = 3;
  cfg.T = 5;
  cfg.delta = 0.0;
  cfg.sigma_noise = 0.0;
  cfg.epsilon = 0.0;
  cfg.seed = 7;
  const SyntheticData data = generate(cfg);
  for (Index t = 2; t <= 5; ++t) {
    CHECK((data.graphs.at(t) - data.graphs.at(1)).norm() == 0.0);
  }
  // initial factors are uniform(0,1), so clamping is inactive and the
  // symmetrized product has rank at most 2r
  const Vector sv = svd(data.graphs.at(1)).singular_values;
  CHECK(numerical_rank(sv) <= 2 * cfg.r);
  for (const Matrix& u : data.latents.u) {
    CHECK((u - data.latents.u.front()).norm() == 0.0);
  }
}

TEST_CASE("noise-free factor products stay rank bounded while drifting") {
  GeneratorConfig cfg;
  cfg.n = 15;
  cfg.r = 4;
  cfg.T = 6;
  cfg.delta = 0.0;
  cfg.sigma_noise = 0.0;
  cfg.epsilon = 0.5;
  cfg.seed = 9;
  const SyntheticData data = generate(cfg);
  for (std::size_t t = 1; t < data.latents.u.size(); ++t) {
    const Matrix raw = data.latents.u[t] * data.latents.v[t].transpose();
    CHECK(numerical_rank(svd(raw).singular_values) <= cfg.r);
    // drift moved the factors
    if (t == 1) CHECK((data.latents.u[1] - data.latents.u[0]).norm() > 0.0);
  }
}

TEST_CASE("paper-scale generation satisfies the snapshot invariants") {
  GeneratorConfig cfg;  // defaults: n=100, r=4, T=60
  cfg.seed = 11;
  const SyntheticData data = generate(cfg);
  CHECK(data.graphs.horizon() == 60);
  CHECK(data.graphs.node_count() == 100);
  CHECK(data.graphs.monotone());
  for (const SymNonNegMatrix& a : data.graphs.snapshots()) {
    CHECK(is_symmetric(a.matrix()));
    CHECK(is_nonnegative(a.matrix()));
    CHECK(a.matrix().allFinite());
  }
  // monotone growth holds entrywise
  for (Index t = 2; t <= 60; ++t) {
    CHECK(((data.graphs.at(t) - data.graphs.at(t - 1)).array() >= 0.0).all());
  }
}

TEST_CASE("fixed seed reproduces the sequence exactly") {
  GeneratorConfig cfg;
  cfg.n = 20;
  cfg.T = 8;
  cfg.seed = 123;
  const SyntheticData a = generate(cfg);
  const SyntheticData b = generate(cfg);
  for (Index t = 1; t <= 8; ++t) {
    CHECK((a.graphs.at(t) - b.graphs.at(t)).norm() == 0.0);
  }
  CHECK((a.v1 - b.v1).norm() == 0.0);

  GeneratorConfig other = cfg;
  other.seed = 124;
  const SyntheticData c = generate(other);
  CHECK((a.graphs.at(1) - c.graphs.at(1)).norm() > 0.0);
}

TEST_CASE("generator config validation") {
  GeneratorConfig cfg;
  cfg.sigma1 = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = GeneratorConfig{};
  cfg.n = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = GeneratorConfig{};
  Vector bad(2);
  bad << -0.1, 0.5;
  cfg.r = 2;
  cfg.v1 = bad;
  cfg.v2 = Vector::Zero(2);
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("toggling the monotone flag changes the sequence kind") {
  GeneratorConfig cfg;
  cfg.n = 10;
  cfg.T = 6;
  cfg.seed = 31;
  cfg.enforce_monotone = false;
  const SyntheticData data = generate(cfg);
  CHECK(!data.graphs.monotone());
  // with noise on, some entry must shrink somewhere over time
  bool any_decrease = false;
  for (Index t = 2; t <= 6 && !any_decrease; ++t) {
    any_decrease = ((data.graphs.at(t) - data.graphs.at(t - 1)).array() < 0.0).any();
  }
  CHECK(any_decrease);
}

TEST_CASE("pinned rng algorithm produces the frozen reference sequence") {
  // guards the cross-run reproducibility contract: mt19937_64 with the
  // fixed 53-bit mapping and the Box-Muller cosine branch
  Rng rng(42);
  CHECK(rng.uniform() == 0.75515553295453897);
  CHECK(rng.uniform() == 0.63903139385469743);
  CHECK(rng.gaussian() == 0.49458385623521361);
  Rng other(7);
  CHECK(other.gaussian() == 0.71302983388758112);
}
