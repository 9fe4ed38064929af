#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dygraf/graph_sequence.hpp"
#include "dygraf/types.hpp"

namespace dygraf {

/// Latent-factor generator settings. Each node carries r-dimensional factors
/// that take a drift step plus Gaussian noise each period; snapshots are the
/// factor product plus entrywise noise, symmetrized, clamped at zero, and
/// (by default) made entrywise nondecreasing over time.
struct GeneratorConfig {
  Index n = 100;
  Index r = 4;
  Index T = 60;
  double delta = 0.01;        // latent noise std
  double sigma_noise = 0.05;  // edge noise std
  double epsilon = 0.1;       // drift strength
  double sigma1 = 1.0;        // first drift length-scale
  double sigma2 = 1.0;        // second drift length-scale
  std::optional<Vector> v1;   // drift anchors; drawn uniform(0,1)^r when absent
  std::optional<Vector> v2;
  std::uint64_t seed = 0;
  /// Symmetrize-and-clamp each raw snapshot.
  bool project_snapshots = true;
  /// Entrywise running max so weights never decrease.
  bool enforce_monotone = true;
  /// The second drift term as printed uses an unsquared distance over an
  /// unsquared length-scale; this flag squares both for sensitivity checks.
  bool symmetric_drift = false;

  void validate() const;
};

/// h(x) = epsilon * ( exp(-||x-v1||^2 / sigma1^2) (x - v1)
///                  + exp(-||x-v2||  / sigma2  ) (x - v2) ).
Vector drift(const Vector& x, const GeneratorConfig& cfg);

struct LatentTrace {
  std::vector<Matrix> u;  // states at t = 0..T
  std::vector<Matrix> v;
};

struct SyntheticData {
  GraphSequence graphs;
  LatentTrace latents;
  Vector v1;
  Vector v2;
};

SyntheticData generate(const GeneratorConfig& cfg);

}  // namespace dygraf
