#pragma once

// Exact limiting kernels of random feature expansions.
//
// Every function takes two equal-length points as spans; the input dimension is
// their length. Composite kernels (regular additive, degree mixture) evaluate
// their base kernels on restricted sub-vectors, so a base only ever sees the
// coordinates of one neighborhood.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sparsekern/csv.hpp"
#include "sparsekern/degree.hpp"
#include "sparsekern/error.hpp"
#include "sparsekern/nonlinearity.hpp"
#include "sparsekern/parallel.hpp"
#include "sparsekern/weight_law.hpp"

namespace sparsekern {

using Point = std::span<const double>;

/// Thrown when exact enumeration of neighborhoods is too expensive.
class enumeration_limit_error : public validation_error {
 public:
  using validation_error::validation_error;
};

inline constexpr double kMaxNeighborhoods = 1e6;

namespace detail {
inline void check_same_dim(Point x, Point y) {
  if (x.size() != y.size())
    throw validation_error("kernel arguments have different dimensions (" + std::to_string(x.size()) +
                           " vs " + std::to_string(y.size()) + ")");
}

inline int sgn(double v) noexcept { return (v > 0.0) - (v < 0.0); }
}  // namespace detail

/// C(n, k) in floating point (exact for the sizes the guard admits).
inline double binomial_coefficient(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(c);
}

inline double rbf_kernel(Point x, Point y, double sigma) {
  detail::check_same_dim(x, y);
  require(sigma > 0.0, "rbf kernel: sigma must be positive");
  double d2 = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) d2 += (x[k] - y[k]) * (x[k] - y[k]);
  return std::exp(-d2 / (2.0 * sigma * sigma));
}

/// Arc-cosine kernel of degree 0: 1 - theta/pi. The angle is 2 atan2(|u - v|, |u + v|)
/// on the unit vectors u, v, which stays accurate near theta = 0 and theta = pi.
inline double arccos0_kernel(Point x, Point y) {
  detail::check_same_dim(x, y);
  double xx = 0.0, yy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    xx += x[k] * x[k];
    yy += y[k] * y[k];
  }
  if (xx == 0.0 || yy == 0.0) throw domain_error("arc-cosine kernel is undefined at the zero vector");
  const double nx = std::sqrt(xx), ny = std::sqrt(yy);
  double diff = 0.0, sum = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double u = x[k] / nx, v = y[k] / ny;
    diff += (u - v) * (u - v);
    sum += (u + v) * (u + v);
  }
  const double theta = 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum));
  return 1.0 - theta / std::numbers::pi;
}

/// Sign features with w ~ N(0, sigma^2/l I) and b ~ U[a1, a2].
inline double dense_sign_kernel(Point x, Point y, double sigma, double a1, double a2) {
  detail::check_same_dim(x, y);
  require(sigma > 0.0 && a1 < a2, "dense sign kernel: need sigma > 0 and a1 < a2");
  double d2 = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) d2 += (x[k] - y[k]) * (x[k] - y[k]);
  const double l = static_cast<double>(x.size());
  return 1.0 - 2.0 * sigma * std::sqrt(2.0 / (std::numbers::pi * l)) * std::sqrt(d2) / (a2 - a1);
}

/// Exponential features with w ~ N(mean, cov): exp(m.s + s.C.s/2) * E exp(2b), s = x + y.
/// An empty mean is read as zero.
inline double mgf_gaussian_kernel(Point x, Point y, const Eigen::VectorXd& mean,
                                  const Eigen::MatrixXd& cov, double bias_constant) {
  detail::check_same_dim(x, y);
  const auto l = static_cast<Eigen::Index>(x.size());
  require(cov.rows() == l && cov.cols() == l, "mgf kernel: covariance dimension mismatch");
  require(mean.size() == 0 || mean.size() == l, "mgf kernel: mean dimension mismatch");
  Eigen::VectorXd s(l);
  for (Eigen::Index k = 0; k < l; ++k) s[k] = x[static_cast<std::size_t>(k)] + y[static_cast<std::size_t>(k)];
  const double lin = mean.size() == 0 ? 0.0 : mean.dot(s);
  return std::exp(lin + 0.5 * s.dot(cov * s)) * bias_constant;
}

/// Degree-1 step features: 1 - |{i : sgn x_i != sgn y_i}| / l, with sgn(0) = 0.
inline double sparse_step_d1(Point x, Point y) {
  detail::check_same_dim(x, y);
  require(!x.empty(), "sparse step kernel: dimension must be positive");
  std::size_t disagree = 0;
  for (std::size_t k = 0; k < x.size(); ++k) disagree += detail::sgn(x[k]) != detail::sgn(y[k]);
  return 1.0 - static_cast<double>(disagree) / static_cast<double>(x.size());
}

/// Degree-1 sign features ("random stump"): 1 - (c/l) ||x - y||_1, c = 2 E|w| / (a2 - a1).
inline double sparse_sign_d1(Point x, Point y, double c) {
  detail::check_same_dim(x, y);
  require(!x.empty(), "sparse sign kernel: dimension must be positive");
  require(c > 0.0, "sparse sign kernel: c must be positive");
  double l1 = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) l1 += std::abs(x[k] - y[k]);
  return 1.0 - c * l1 / static_cast<double>(x.size());
}

inline double stump_constant(double mean_abs_weight, double a1, double a2) {
  require(a1 < a2, "stump constant: need a1 < a2");
  return 2.0 * mean_abs_weight / (a2 - a1);
}

class KernelSpec;
using KernelPtr = std::shared_ptr<const KernelSpec>;

namespace kernel {
struct Rbf {
  double sigma;
};
struct ArcCos0 {};
struct DenseSign {
  double sigma, a1, a2;
};
struct MgfGaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  double bias_constant;
};
struct SparseStepD1 {};
struct SparseSignD1 {
  double c;
};
struct RegularAdditive {
  std::size_t d;
  KernelPtr base;
};
/// pmf over 0..l; bases[d] is the base kernel on d coordinates (entries with zero
/// mass may be null); degree0 is the constant E[h(b)^2] of a feature with no inputs.
struct DegreeMixture {
  std::vector<double> pmf;
  std::vector<KernelPtr> bases;
  double degree0;
};
}  // namespace kernel

/// Immutable description of one exact kernel.
class KernelSpec {
 public:
  using Variant = std::variant<kernel::Rbf, kernel::ArcCos0, kernel::DenseSign, kernel::MgfGaussian,
                               kernel::SparseStepD1, kernel::SparseSignD1, kernel::RegularAdditive,
                               kernel::DegreeMixture>;

  static KernelSpec rbf(double sigma) {
    require(std::isfinite(sigma) && sigma > 0.0, "rbf: sigma must be positive");
    return KernelSpec(kernel::Rbf{sigma});
  }
  static KernelSpec arccos0() { return KernelSpec(kernel::ArcCos0{}); }
  static KernelSpec dense_sign(double sigma, double a1, double a2) {
    require(sigma > 0.0 && a1 < a2, "dense sign: need sigma > 0 and a1 < a2");
    return KernelSpec(kernel::DenseSign{sigma, a1, a2});
  }
  static KernelSpec mgf_gaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov, double bias_constant) {
    require(cov.rows() == cov.cols(), "mgf: covariance must be square");
    require(mean.size() == 0 || mean.size() == cov.rows(), "mgf: mean dimension mismatch");
    require(std::isfinite(bias_constant) && bias_constant > 0.0,
            "mgf: bias constant must be finite and positive");
    if (cov.size() > 0) {
      const double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
      const double mag = std::max(1.0, cov.cwiseAbs().maxCoeff());
      require(asym <= 1e-12 * mag, "mgf: covariance must be symmetric");
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, Eigen::EigenvaluesOnly);
      require(es.eigenvalues().minCoeff() >= -1e-12 * mag,
              "mgf: covariance must be positive semidefinite");
    }
    return KernelSpec(kernel::MgfGaussian{std::move(mean), std::move(cov), bias_constant});
  }
  static KernelSpec sparse_step_d1() { return KernelSpec(kernel::SparseStepD1{}); }
  static KernelSpec sparse_sign_d1(double c) {
    require(c > 0.0, "sparse sign: c must be positive");
    return KernelSpec(kernel::SparseSignD1{c});
  }
  static KernelSpec regular_additive(std::size_t d, KernelSpec base) {
    require(d >= 1, "regular additive: degree must be at least 1");
    return KernelSpec(kernel::RegularAdditive{d, std::make_shared<const KernelSpec>(std::move(base))});
  }
  static KernelSpec degree_mixture(std::vector<double> pmf, std::vector<KernelPtr> bases,
                                   double degree0) {
    require(pmf.size() >= 2, "degree mixture: pmf needs entries for 0..l");
    double total = 0.0;
    for (double p : pmf) {
      require(std::isfinite(p) && p >= 0.0, "degree mixture: pmf entries must be nonnegative");
      total += p;
    }
    require(std::abs(total - 1.0) <= 1e-9, "degree mixture: pmf must sum to 1");
    require(bases.size() == pmf.size(), "degree mixture: need one base slot per degree 0..l");
    for (std::size_t d = 1; d < pmf.size(); ++d)
      require(pmf[d] == 0.0 || bases[d] != nullptr,
              "degree mixture: missing base kernel for degree " + std::to_string(d));
    require(std::isfinite(degree0), "degree mixture: degree-0 constant must be finite");
    return KernelSpec(kernel::DegreeMixture{std::move(pmf), std::move(bases), degree0});
  }

  const Variant& variant() const noexcept { return v_; }

  double operator()(Point x, Point y) const;

  std::string name() const {
    static constexpr const char* names[] = {"rbf", "arccos0", "dense_sign", "mgf_gaussian",
                                            "sparse_step_d1", "sparse_sign_d1", "regular_additive",
                                            "degree_mixture"};
    return names[v_.index()];
  }

 private:
  explicit KernelSpec(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// Average of base over all d-subsets of the coordinates.
inline double regular_additive_kernel(Point x, Point y, std::size_t d, const KernelSpec& base) {
  detail::check_same_dim(x, y);
  const std::size_t l = x.size();
  require(d >= 1 && d <= l, "regular additive kernel: need 1 <= d <= l");
  const double count = binomial_coefficient(l, d);
  if (count > kMaxNeighborhoods)
    throw enumeration_limit_error("C(" + std::to_string(l) + "," + std::to_string(d) +
                                  ") neighborhoods exceed the enumeration limit of 1e6; "
                                  "use Monte Carlo features instead");
  std::vector<std::size_t> idx(d);
  for (std::size_t k = 0; k < d; ++k) idx[k] = k;
  std::vector<double> xs(d), ys(d);
  double sum = 0.0;
  while (true) {
    for (std::size_t k = 0; k < d; ++k) {
      xs[k] = x[idx[k]];
      ys[k] = y[idx[k]];
    }
    sum += base(xs, ys);
    // next combination in lexicographic order
    std::size_t k = d;
    while (k > 0 && idx[k - 1] == l - d + k - 1) --k;
    if (k == 0) break;
    ++idx[k - 1];
    for (std::size_t r = k; r < d; ++r) idx[r] = idx[r - 1] + 1;
  }
  return sum / count;
}

inline double degree_mixture_kernel(Point x, Point y, const std::vector<double>& pmf,
                                    const std::vector<KernelPtr>& bases, double degree0) {
  detail::check_same_dim(x, y);
  require(pmf.size() == x.size() + 1, "degree mixture: pmf length must be l + 1");
  require(bases.size() == pmf.size(), "degree mixture: need one base slot per degree");
  double k = pmf[0] * degree0;
  for (std::size_t d = 1; d < pmf.size(); ++d) {
    if (pmf[d] == 0.0) continue;
    require(bases[d] != nullptr, "degree mixture: missing base for degree " + std::to_string(d));
    k += pmf[d] * regular_additive_kernel(x, y, d, *bases[d]);
  }
  return k;
}

inline double KernelSpec::operator()(Point x, Point y) const {
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, kernel::Rbf>) return rbf_kernel(x, y, k.sigma);
        else if constexpr (std::is_same_v<K, kernel::ArcCos0>) return arccos0_kernel(x, y);
        else if constexpr (std::is_same_v<K, kernel::DenseSign>)
          return dense_sign_kernel(x, y, k.sigma, k.a1, k.a2);
        else if constexpr (std::is_same_v<K, kernel::MgfGaussian>)
          return mgf_gaussian_kernel(x, y, k.mean, k.covariance, k.bias_constant);
        else if constexpr (std::is_same_v<K, kernel::SparseStepD1>) return sparsekern::sparse_step_d1(x, y);
        else if constexpr (std::is_same_v<K, kernel::SparseSignD1>) return sparsekern::sparse_sign_d1(x, y, k.c);
        else if constexpr (std::is_same_v<K, kernel::RegularAdditive>)
          return regular_additive_kernel(x, y, k.d, *k.base);
        else return degree_mixture_kernel(x, y, k.pmf, k.bases, k.degree0);
      },
      v_);
}

namespace detail {
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Point row_of(const RowMatrix& X, Eigen::Index i) {
  return {X.row(i).data(), static_cast<std::size_t>(X.cols())};
}
}  // namespace detail

/// Symmetric n x n matrix of k(x_i, x_j) over the rows of X.
inline Eigen::MatrixXd gram_matrix(const KernelSpec& k, const Eigen::Ref<const Eigen::MatrixXd>& X) {
  const detail::RowMatrix R = X;
  const Eigen::Index n = R.rows();
  Eigen::MatrixXd G(n, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ui) {
    const auto i = static_cast<Eigen::Index>(ui);
    for (Eigen::Index j = 0; j <= i; ++j) G(i, j) = k(detail::row_of(R, i), detail::row_of(R, j));
  });
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) G(i, j) = G(j, i);
  return G;
}

/// |A| x |B| matrix of k(a_i, b_j).
inline Eigen::MatrixXd cross_gram(const KernelSpec& k, const Eigen::Ref<const Eigen::MatrixXd>& A,
                                  const Eigen::Ref<const Eigen::MatrixXd>& B) {
  require(A.cols() == B.cols(), "cross_gram: dimension mismatch");
  const detail::RowMatrix RA = A, RB = B;
  Eigen::MatrixXd K(RA.rows(), RB.rows());
  parallel_for(static_cast<std::size_t>(RA.rows()), [&](std::size_t ui) {
    const auto i = static_cast<Eigen::Index>(ui);
    for (Eigen::Index j = 0; j < RB.rows(); ++j) K(i, j) = k(detail::row_of(RA, i), detail::row_of(RB, j));
  });
  return K;
}

/// Header row k_0..k_{n-1}, then n rows, row-major.
inline void write_gram_csv(std::ostream& os, const Eigen::Ref<const Eigen::MatrixXd>& G) {
  for (Eigen::Index j = 0; j < G.cols(); ++j) os << (j ? "," : "") << "k_" << j;
  os << '\n';
  for (Eigen::Index i = 0; i < G.rows(); ++i) {
    for (Eigen::Index j = 0; j < G.cols(); ++j) os << (j ? "," : "") << format_double(G(i, j));
    os << '\n';
  }
}

/// E[(gain * h(b))^2] for a feature with no inputs, i.e. the degree-0 kernel term.
inline double degree0_constant(Nonlinearity h, const BiasLaw& bias) {
  const double g2 = h.gain() * h.gain();
  using K = Nonlinearity::Kind;
  if (!bias.present) {
    double v[2] = {0.0, 0.0};
    h.eval(0.0, v);
    return g2 * (v[0] * v[0] + (h.outputs() == 2 ? v[1] * v[1] : 0.0));
  }
  const double lo = bias.lo, hi = bias.hi, width = hi - lo;
  switch (h.kind()) {
    case K::step:
      return g2 * std::max(0.0, hi - std::max(lo, 0.0)) / width;  // gain^2 * P(b > 0)
    case K::sign:
      return 1.0;
    case K::cosine:
      return g2 * (0.5 + (std::sin(2.0 * hi) - std::sin(2.0 * lo)) / (4.0 * width));
    case K::sin_cos_pair:
      return 1.0;
    case K::exponential:
      return bias.exp2_moment();
    case K::threshold_poly: {
      // E[max(b,0)^(2p)] for b ~ U[lo, hi]
      const double p2 = 2.0 * h.power();
      const double top = std::max(hi, 0.0), bot = std::max(lo, 0.0);
      return g2 * (std::pow(top, p2 + 1) - std::pow(bot, p2 + 1)) / ((p2 + 1) * width);
    }
  }
  return 0.0;
}

/// Kernel on d coordinates induced by one feature of degree d, when a closed form exists.
/// Sign-feature forms are exact while |w.x| stays inside the bias interval.
inline std::optional<KernelSpec> per_degree_kernel(std::size_t d, const WeightLaw& law,
                                                   Nonlinearity h) {
  using K = Nonlinearity::Kind;
  switch (h.kind()) {
    case K::cosine: {
      if (!law.gaussian() || !law.bias.present) return std::nullopt;
      const double periods = (law.bias.hi - law.bias.lo) / (2.0 * std::numbers::pi);
      if (std::abs(periods - std::round(periods)) > 1e-12 || std::round(periods) < 1) return std::nullopt;
      return KernelSpec::rbf(1.0 / law.stddev(d));
    }
    case K::sin_cos_pair:
      if (!law.gaussian()) return std::nullopt;
      return KernelSpec::rbf(1.0 / law.stddev(d));
    case K::step:
      if (!law.gaussian() || law.bias.present) return std::nullopt;
      return KernelSpec::arccos0();
    case K::sign:
      if (!law.bias.present) return std::nullopt;
      if (law.gaussian())
        return KernelSpec::dense_sign(law.stddev(d) * std::sqrt(static_cast<double>(d)), law.bias.lo,
                                      law.bias.hi);
      if (d == 1) return KernelSpec::sparse_sign_d1(stump_constant(law.sigma, law.bias.lo, law.bias.hi));
      return std::nullopt;
    case K::exponential: {
      if (!law.gaussian()) return std::nullopt;
      const double s = law.stddev(d);
      const auto dd = static_cast<Eigen::Index>(d);
      return KernelSpec::mgf_gaussian(Eigen::VectorXd(), s * s * Eigen::MatrixXd::Identity(dd, dd),
                                      law.bias.exp2_moment());
    }
    case K::threshold_poly:
      return std::nullopt;
  }
  return std::nullopt;
}

/// Limiting kernel of build_feature_map(l, m, degrees, law, h, .) as m -> infinity,
/// or nullopt when no exact oracle is available.
inline std::optional<KernelSpec> limiting_kernel(const DegreeSpec& degrees, const WeightLaw& law,
                                                 Nonlinearity h) {
  const std::size_t l = degrees.dim();
  if (const auto* r = std::get_if<DegreeSpec::Regular>(&degrees.variant())) {
    auto base = per_degree_kernel(r->d, law, h);
    if (!base) return std::nullopt;
    return KernelSpec::regular_additive(r->d, std::move(*base));
  }
  const auto pmf = degrees.pmf();
  std::vector<KernelPtr> bases(l + 1);
  for (std::size_t d = 1; d <= l; ++d) {
    if (pmf[d] == 0.0) continue;
    auto base = per_degree_kernel(d, law, h);
    if (!base) return std::nullopt;
    bases[d] = std::make_shared<const KernelSpec>(std::move(*base));
  }
  return KernelSpec::degree_mixture(pmf, std::move(bases), degree0_constant(h, law.bias));
}

// JSON with a "variant" tag.

inline void to_json(nlohmann::json& j, const KernelSpec& k);
inline KernelSpec kernel_from_json(const nlohmann::json& j);

inline void to_json(nlohmann::json& j, const KernelSpec& spec) {
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        j = nlohmann::json{{"variant", spec.name()}};
        if constexpr (std::is_same_v<K, kernel::Rbf>) {
          j["sigma"] = k.sigma;
        } else if constexpr (std::is_same_v<K, kernel::DenseSign>) {
          j["sigma"] = k.sigma;
          j["a1"] = k.a1;
          j["a2"] = k.a2;
        } else if constexpr (std::is_same_v<K, kernel::MgfGaussian>) {
          j["mean"] = std::vector<double>(k.mean.data(), k.mean.data() + k.mean.size());
          nlohmann::json rows = nlohmann::json::array();
          for (Eigen::Index r = 0; r < k.covariance.rows(); ++r) {
            std::vector<double> row(static_cast<std::size_t>(k.covariance.cols()));
            for (Eigen::Index c = 0; c < k.covariance.cols(); ++c) row[static_cast<std::size_t>(c)] = k.covariance(r, c);
            rows.push_back(row);
          }
          j["covariance"] = rows;
          j["bias_constant"] = k.bias_constant;
        } else if constexpr (std::is_same_v<K, kernel::SparseSignD1>) {
          j["c"] = k.c;
        } else if constexpr (std::is_same_v<K, kernel::RegularAdditive>) {
          j["d"] = k.d;
          j["base"] = *k.base;
        } else if constexpr (std::is_same_v<K, kernel::DegreeMixture>) {
          j["pmf"] = k.pmf;
          nlohmann::json bases = nlohmann::json::array();
          for (const auto& b : k.bases) bases.push_back(b ? nlohmann::json(*b) : nlohmann::json());
          j["bases"] = bases;
          j["degree0"] = k.degree0;
        }
      },
      spec.variant());
}

inline KernelSpec kernel_from_json(const nlohmann::json& j) {
  try {
    const auto tag = j.at("variant").get<std::string>();
    if (tag == "rbf") return KernelSpec::rbf(j.at("sigma").get<double>());
    if (tag == "arccos0") return KernelSpec::arccos0();
    if (tag == "dense_sign")
      return KernelSpec::dense_sign(j.at("sigma").get<double>(), j.at("a1").get<double>(),
                                    j.at("a2").get<double>());
    if (tag == "mgf_gaussian") {
      const auto mean = j.at("mean").get<std::vector<double>>();
      const auto rows = j.at("covariance").get<std::vector<std::vector<double>>>();
      Eigen::MatrixXd cov(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        require(rows[r].size() == rows.size(), "mgf covariance must be square");
        for (std::size_t c = 0; c < rows.size(); ++c)
          cov(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
      }
      return KernelSpec::mgf_gaussian(Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size())),
                                      cov, j.at("bias_constant").get<double>());
    }
    if (tag == "sparse_step_d1") return KernelSpec::sparse_step_d1();
    if (tag == "sparse_sign_d1") return KernelSpec::sparse_sign_d1(j.at("c").get<double>());
    if (tag == "regular_additive")
      return KernelSpec::regular_additive(j.at("d").get<std::size_t>(), kernel_from_json(j.at("base")));
    if (tag == "degree_mixture") {
      std::vector<KernelPtr> bases;
      for (const auto& b : j.at("bases"))
        bases.push_back(b.is_null() ? nullptr : std::make_shared<const KernelSpec>(kernel_from_json(b)));
      return KernelSpec::degree_mixture(j.at("pmf").get<std::vector<double>>(), std::move(bases),
                                        j.at("degree0").get<double>());
    }
    throw validation_error("unknown kernel variant '" + tag + "'");
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("malformed kernel JSON: ") + e.what());
  }
}

}  // namespace sparsekern
