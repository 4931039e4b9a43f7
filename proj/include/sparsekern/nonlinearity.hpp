#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include "sparsekern/error.hpp"

namespace sparsekern {

/// Pointwise activation h applied to w.x + b.
///
/// Step, threshold-polynomial and cosine features carry an output gain of sqrt(2)
/// so that (1/m) phi(x).phi(x') estimates the usual normalization of their limiting
/// kernels: the arc-cosine family is defined with a factor 2 in front of the
/// Gaussian integral, and cos(w.x + b) with uniform phase has E[h^2] = 1/2.
class Nonlinearity {
 public:
  enum class Kind { step, sign, cosine, sin_cos_pair, exponential, threshold_poly };

  constexpr Nonlinearity() = default;
  constexpr explicit Nonlinearity(Kind kind, unsigned power = 0) : kind_(kind), power_(power) {
    if (kind_ == Kind::threshold_poly && power_ == 0) kind_ = Kind::step;  // 0^0 treated as step
    if (kind_ != Kind::threshold_poly) power_ = 0;
  }

  static constexpr Nonlinearity step() { return Nonlinearity(Kind::step); }
  static constexpr Nonlinearity sign() { return Nonlinearity(Kind::sign); }
  static constexpr Nonlinearity cosine() { return Nonlinearity(Kind::cosine); }
  static constexpr Nonlinearity sin_cos_pair() { return Nonlinearity(Kind::sin_cos_pair); }
  static constexpr Nonlinearity exponential() { return Nonlinearity(Kind::exponential); }
  static constexpr Nonlinearity threshold_poly(unsigned p) {
    return Nonlinearity(Kind::threshold_poly, p);
  }

  constexpr Kind kind() const noexcept { return kind_; }
  constexpr unsigned power() const noexcept { return power_; }

  /// Outputs emitted per feature.
  constexpr std::size_t outputs() const noexcept { return kind_ == Kind::sin_cos_pair ? 2 : 1; }

  double gain() const noexcept {
    switch (kind_) {
      case Kind::step:
      case Kind::cosine:
      case Kind::threshold_poly:
        return std::numbers::sqrt2;
      default:
        return 1.0;
    }
  }

  /// Writes outputs() raw values h(z) (without gain) to out.
  void eval(double z, double* out) const noexcept {
    switch (kind_) {
      case Kind::step:
        out[0] = z > 0.0 ? 1.0 : 0.0;
        return;
      case Kind::sign:
        out[0] = z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0);
        return;
      case Kind::cosine:
        out[0] = std::cos(z);
        return;
      case Kind::sin_cos_pair:
        out[0] = std::sin(z);
        out[1] = std::cos(z);
        return;
      case Kind::exponential:
        out[0] = std::exp(z);
        return;
      case Kind::threshold_poly:
        out[0] = z > 0.0 ? std::pow(z, static_cast<double>(power_)) : 0.0;
        return;
    }
  }

  double operator()(double z) const noexcept {
    double v[2];
    eval(z, v);
    return v[0];
  }

  std::string name() const {
    switch (kind_) {
      case Kind::step: return "step";
      case Kind::sign: return "sign";
      case Kind::cosine: return "cosine";
      case Kind::sin_cos_pair: return "sincos";
      case Kind::exponential: return "exp";
      case Kind::threshold_poly: return "relu" + std::to_string(power_);
    }
    return "?";
  }

  /// Accepts the names produced by name() plus "relu" for relu1.
  static Nonlinearity parse(const std::string& s) {
    if (s == "step" || s == "relu0") return step();
    if (s == "sign") return sign();
    if (s == "cosine" || s == "cos") return cosine();
    if (s == "sincos") return sin_cos_pair();
    if (s == "exp" || s == "exponential") return exponential();
    if (s == "relu") return threshold_poly(1);
    if (s.rfind("relu", 0) == 0 && s.size() > 4) {
      try {
        std::size_t pos = 0;
        const unsigned long p = std::stoul(s.substr(4), &pos);
        if (pos == s.size() - 4) return threshold_poly(static_cast<unsigned>(p));
      } catch (const std::exception&) {
      }
    }
    throw validation_error("unknown nonlinearity '" + s +
                           "' (expected step|sign|cosine|sincos|exp|reluP)");
  }

  friend constexpr bool operator==(const Nonlinearity&, const Nonlinearity&) = default;

 private:
  Kind kind_ = Kind::cosine;
  unsigned power_ = 0;
};

}  // namespace sparsekern
