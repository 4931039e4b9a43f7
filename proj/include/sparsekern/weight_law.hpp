#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>

#include "sparsekern/error.hpp"
#include "sparsekern/rng.hpp"

namespace sparsekern {

/// Bias law: uniform on [lo, hi], or no bias at all.
struct BiasLaw {
  bool present = false;
  double lo = 0.0;
  double hi = 0.0;

  static BiasLaw none() { return {}; }
  static BiasLaw uniform(double lo, double hi) {
    require(std::isfinite(lo) && std::isfinite(hi) && lo < hi,
            "bias interval requires a1 < a2");
    return {true, lo, hi};
  }
  /// Symmetric full period [-pi, pi] used with Fourier features.
  static BiasLaw phase() { return uniform(-std::numbers::pi, std::numbers::pi); }

  double draw(Stream& rng) const { return present ? rng.uniform(lo, hi) : 0.0; }

  /// E exp(2b), the scale constant of moment-generating-function kernels.
  double exp2_moment() const {
    if (!present) return 1.0;
    return (std::exp(2.0 * hi) - std::exp(2.0 * lo)) / (2.0 * (hi - lo));
  }

  friend bool operator==(const BiasLaw&, const BiasLaw&) = default;
};

/// Law of the nonzero input weights of a feature with in-degree d, plus its bias law.
///
/// gaussian_iso:    w_k ~ N(0, sigma^2), independent of d.
/// gaussian_scaled: w_k ~ N(0, sigma^2 / d), so E|w|^2 = sigma^2 for every degree.
/// rademacher:      w_k = +-sigma with equal probability.
struct WeightLaw {
  enum class Kind { gaussian_iso, gaussian_scaled, rademacher };

  Kind kind = Kind::gaussian_iso;
  double sigma = 1.0;
  BiasLaw bias;

  static WeightLaw gaussian_iso(double sigma, BiasLaw bias = {}) {
    return make(Kind::gaussian_iso, sigma, bias);
  }
  static WeightLaw gaussian_scaled(double sigma, BiasLaw bias = {}) {
    return make(Kind::gaussian_scaled, sigma, bias);
  }
  static WeightLaw rademacher(double scale, BiasLaw bias = {}) {
    return make(Kind::rademacher, scale, bias);
  }

  /// Standard deviation of each nonzero weight of a degree-d feature.
  double stddev(std::size_t d) const noexcept {
    if (kind == Kind::gaussian_scaled && d > 0) return sigma / std::sqrt(static_cast<double>(d));
    return sigma;
  }

  bool gaussian() const noexcept { return kind != Kind::rademacher; }

  double draw(Stream& rng, std::size_t d) const {
    if (kind == Kind::rademacher) return rng.bernoulli(0.5) ? sigma : -sigma;
    return stddev(d) * rng.normal();
  }

  /// E|w| for a single weight of a degree-d feature.
  double mean_abs(std::size_t d) const noexcept {
    if (kind == Kind::rademacher) return sigma;
    return stddev(d) * std::sqrt(2.0 / std::numbers::pi);
  }

  std::string name() const {
    switch (kind) {
      case Kind::gaussian_iso: return "gaussian-iso";
      case Kind::gaussian_scaled: return "gaussian-scaled";
      case Kind::rademacher: return "rademacher";
    }
    return "?";
  }

  friend bool operator==(const WeightLaw&, const WeightLaw&) = default;

 private:
  static WeightLaw make(Kind kind, double sigma, BiasLaw bias) {
    require(std::isfinite(sigma) && sigma > 0.0, "weight scale sigma must be positive");
    return {kind, sigma, bias};
  }
};

}  // namespace sparsekern
