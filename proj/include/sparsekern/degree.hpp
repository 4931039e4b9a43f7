#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <cstdint>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "sparsekern/error.hpp"
#include "sparsekern/rng.hpp"

namespace sparsekern {

/// In-degree law D(d) over {0, ..., l} for the hidden features.
class DegreeSpec {
 public:
  struct Regular {
    std::size_t d;
  };
  struct Binomial {
    double p;
  };
  struct Custom {
    std::vector<double> pmf;
  };
  using Variant = std::variant<Regular, Binomial, Custom>;

  static DegreeSpec regular(std::size_t l, std::size_t d) {
    require(l >= 1, "degree spec: input dimension must be positive");
    require(d >= 1 && d <= l,
            "regular degree must satisfy 1 <= d <= l (got d=" + std::to_string(d) +
                ", l=" + std::to_string(l) + ")");
    return DegreeSpec(l, Regular{d});
  }

  static DegreeSpec binomial(std::size_t l, double p) {
    require(l >= 1, "degree spec: input dimension must be positive");
    require(p >= 0.0 && p <= 1.0, "binomial degree probability must lie in [0, 1]");
    return DegreeSpec(l, Binomial{p});
  }

  /// pmf[d] = D(d) for d = 0..l, so l = pmf.size() - 1.
  static DegreeSpec custom(std::vector<double> pmf) {
    require(pmf.size() >= 2, "custom degree pmf needs entries for 0..l with l >= 1");
    double total = 0.0;
    for (double v : pmf) {
      require(std::isfinite(v) && v >= 0.0, "custom degree pmf entries must be nonnegative");
      total += v;
    }
    require(std::abs(total - 1.0) <= 1e-12, "custom degree pmf must sum to 1 (within 1e-12)");
    const std::size_t l = pmf.size() - 1;
    return DegreeSpec(l, Custom{std::move(pmf)});
  }

  std::size_t dim() const noexcept { return l_; }
  const Variant& variant() const noexcept { return v_; }
  bool is_regular() const noexcept { return std::holds_alternative<Regular>(v_); }

  /// Full probability mass function over 0..l.
  std::vector<double> pmf() const {
    std::vector<double> out(l_ + 1, 0.0);
    if (auto r = std::get_if<Regular>(&v_)) {
      out[r->d] = 1.0;
    } else if (auto b = std::get_if<Binomial>(&v_)) {
      for (std::size_t d = 0; d <= l_; ++d) out[d] = binomial_pmf(l_, b->p, d);
    } else {
      out = std::get<Custom>(v_).pmf;
    }
    return out;
  }

  double mean() const {
    const auto p = pmf();
    double m = 0.0;
    for (std::size_t d = 0; d < p.size(); ++d) m += static_cast<double>(d) * p[d];
    return m;
  }

  /// One degree draw. Consumes a fixed number of variates per law.
  std::size_t draw(Stream& rng) const {
    if (auto r = std::get_if<Regular>(&v_)) return r->d;
    if (auto b = std::get_if<Binomial>(&v_)) {
      std::size_t d = 0;
      for (std::size_t k = 0; k < l_; ++k) d += rng.bernoulli(b->p) ? 1 : 0;
      return d;
    }
    const auto& pmf = std::get<Custom>(v_).pmf;
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t d = 0; d < pmf.size(); ++d) {
      acc += pmf[d];
      if (u < acc) return d;
    }
    // u landed in the rounding slack above the last cumulative value
    for (std::size_t d = pmf.size(); d-- > 0;)
      if (pmf[d] > 0.0) return d;
    return 0;
  }

  std::string to_string() const {
    if (auto r = std::get_if<Regular>(&v_)) return "regular:" + std::to_string(r->d);
    if (auto b = std::get_if<Binomial>(&v_)) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "binomial:%.17g", b->p);
      return buf;
    }
    return "custom";
  }

  static double binomial_pmf(std::size_t n, double p, std::size_t k) {
    if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
    if (p >= 1.0) return k == n ? 1.0 : 0.0;
    const double nd = static_cast<double>(n), kd = static_cast<double>(k);
    const double log_choose = std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0);
    return std::exp(log_choose + kd * std::log(p) + (nd - kd) * std::log1p(-p));
  }

 private:
  DegreeSpec(std::size_t l, Variant v) : l_(l), v_(std::move(v)) {}

  std::size_t l_;
  Variant v_;
};

/// Degree of feature i is the first draw of substream (seed, i), the same draw
/// build_feature_map makes, so the two always agree.
inline std::vector<std::size_t> sample_degrees(const DegreeSpec& spec, std::size_t m,
                                               std::uint64_t seed) {
  std::vector<std::size_t> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    Stream rng(seed, i);
    out[i] = spec.draw(rng);
  }
  return out;
}

/// Uniform d-subset of {0, ..., l-1} in increasing order (selection sampling).
inline std::vector<std::uint32_t> sample_neighborhood(std::size_t l, std::size_t d, Stream& rng) {
  require(d <= l, "neighborhood size d=" + std::to_string(d) + " exceeds input dimension l=" +
                      std::to_string(l));
  std::vector<std::uint32_t> out;
  out.reserve(d);
  std::size_t needed = d;
  for (std::size_t j = 0; j < l && needed > 0; ++j) {
    const std::size_t remaining = l - j;
    if (needed == remaining || rng.below(remaining) < needed) {
      out.push_back(static_cast<std::uint32_t>(j));
      --needed;
    }
  }
  return out;
}

}  // namespace sparsekern
