#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace dygraf {

/// Deterministic random source with a pinned algorithm so sequences can be
/// replayed across platforms and reimplementations. Uniform doubles take the
/// top 53 bits of an mt19937_64 draw; gaussians use the Box-Muller cosine
/// branch on two fresh uniforms (no cached second value). The identifier
/// below goes into run metadata.
class Rng {
 public:
  static constexpr const char* kAlgorithmId = "mt19937_64/u53/box-muller-cos";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller, cosine branch only.
  double gaussian() {
    double u1 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dygraf
