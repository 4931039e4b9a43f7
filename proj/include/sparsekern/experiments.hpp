#pragma once

// Reproducible numerical studies: Monte Carlo convergence to the limiting kernel,
// generalization on a sparse polynomial target, and robustness to sparse input
// corruption. Every study is a pure function of its config; cells draw from
// substreams derived from (seed, cell index), so results do not depend on the
// number of worker threads.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sparsekern/csv.hpp"
#include "sparsekern/degree.hpp"
#include "sparsekern/error.hpp"
#include "sparsekern/feature_map.hpp"
#include "sparsekern/kernels.hpp"
#include "sparsekern/parallel.hpp"
#include "sparsekern/regression.hpp"
#include "sparsekern/rng.hpp"
#include "sparsekern/version.hpp"

namespace sparsekern {

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "loglog_slope: need at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0.0 && y[i] > 0.0, "loglog_slope: values must be positive");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

inline Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, double lo, double hi,
                             std::uint64_t seed) {
  Matrix X(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    Stream rng(seed, static_cast<std::uint64_t>(i));
    for (Eigen::Index k = 0; k < cols; ++k) X(i, k) = rng.uniform(lo, hi);
  }
  return X;
}

inline Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double sd, std::uint64_t seed) {
  Matrix X(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    Stream rng(seed, static_cast<std::uint64_t>(i));
    for (Eigen::Index k = 0; k < cols; ++k) X(i, k) = sd * rng.normal();
  }
  return X;
}

// ---------------------------------------------------------------------------
// Convergence of empirical kernels

/// Probe pairs (A.row(j), B.row(j)): the first half uniform in [-1,1]^l, then
/// antipodal pairs (b = -a), then near-duplicates (b = a + N(0, 0.01^2)).
struct ProbePairs {
  Matrix A, B;
};

inline ProbePairs make_probe_pairs(std::size_t l, std::size_t count, std::uint64_t seed) {
  require(l >= 1 && count >= 1, "probe pairs: need l >= 1 and at least one pair");
  const auto n = static_cast<Eigen::Index>(count), L = static_cast<Eigen::Index>(l);
  ProbePairs p{uniform_matrix(n, L, -1.0, 1.0, derive_seed(seed, {1})), Matrix(n, L)};
  const Eigen::Index half = n / 2, antipodal_end = half + (n - half) / 2;
  for (Eigen::Index j = 0; j < n; ++j) {
    Stream rng(derive_seed(seed, {2}), static_cast<std::uint64_t>(j));
    for (Eigen::Index k = 0; k < L; ++k) {
      if (j < half)
        p.B(j, k) = rng.uniform(-1.0, 1.0);
      else if (j < antipodal_end)
        p.B(j, k) = -p.A(j, k);
      else
        p.B(j, k) = p.A(j, k) + 0.01 * rng.normal();
    }
  }
  return p;
}

struct ConvergenceConfig {
  std::size_t l = 8;
  Nonlinearity nonlinearity = Nonlinearity::cosine();
  /// Empty means dense connectivity (regular degree l).
  std::optional<DegreeSpec> degrees;
  WeightLaw law = WeightLaw::gaussian_iso(1.0, BiasLaw::phase());
  std::vector<std::size_t> m_grid{256, 1024, 4096, 16384};
  std::size_t probe_pairs = 200;
  std::uint64_t seed = 0;

  DegreeSpec degree_spec() const { return degrees ? *degrees : DegreeSpec::regular(l, l); }
};

struct ConvergencePoint {
  std::size_t m;
  double sup_error;
  double mean_abs_error;
};

struct ConvergenceResult {
  std::vector<ConvergencePoint> points;
  /// log-log slope of sup error against m (NaN with fewer than two grid points).
  double slope = std::numeric_limits<double>::quiet_NaN();

  Table table() const {
    Table t({"m", "sup_error", "mean_abs_error"});
    for (const auto& p : points)
      t.add_row({static_cast<std::int64_t>(p.m), p.sup_error, p.mean_abs_error});
    return t;
  }
};

/// Sup over fixed probe pairs of |empirical - exact| kernel for each m in the grid.
inline ConvergenceResult convergence_study(const ConvergenceConfig& cfg) {
  require(!cfg.m_grid.empty(), "convergence study: m grid is empty");
  for (auto m : cfg.m_grid) require(m >= 1, "convergence study: m must be positive");
  const DegreeSpec degrees = cfg.degree_spec();
  require(degrees.dim() == cfg.l, "convergence study: degree spec dimension differs from l");
  const auto oracle = limiting_kernel(degrees, cfg.law, cfg.nonlinearity);
  if (!oracle)
    throw validation_error("convergence study: no exact kernel for nonlinearity '" +
                           cfg.nonlinearity.name() + "' with " + cfg.law.name() + " weights");

  const auto probes = make_probe_pairs(cfg.l, cfg.probe_pairs, derive_seed(cfg.seed, {0}));
  std::vector<double> exact(cfg.probe_pairs);
  {
    const detail::RowMatrix A = probes.A, B = probes.B;
    parallel_for(cfg.probe_pairs, [&](std::size_t j) {
      const auto i = static_cast<Eigen::Index>(j);
      exact[j] = (*oracle)(detail::row_of(A, i), detail::row_of(B, i));
    });
  }

  ConvergenceResult out;
  out.points.resize(cfg.m_grid.size());
  parallel_for(cfg.m_grid.size(), [&](std::size_t c) {
    const std::size_t m = cfg.m_grid[c];
    const auto map = build_feature_map(cfg.l, m, degrees, cfg.law, cfg.nonlinearity,
                                       derive_seed(cfg.seed, {1, c}));
    const auto est = kernel_estimates(map, probes.A, probes.B);
    double sup = 0.0, mean = 0.0;
    for (std::size_t j = 0; j < est.size(); ++j) {
      const double e = std::abs(est[j] - exact[j]);
      sup = std::max(sup, e);
      mean += e;
    }
    out.points[c] = {m, sup, mean / static_cast<double>(est.size())};
  });
  if (out.points.size() >= 2) {
    std::vector<double> ms, errs;
    for (const auto& p : out.points) {
      ms.push_back(static_cast<double>(p.m));
      errs.push_back(p.sup_error);
    }
    out.slope = loglog_slope(ms, errs);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sparse polynomial target

/// f(x) = c1 a.x + c2 p(x), p a sum of three degree-3 monomials in distinct coordinates.
/// c1, c2 put a (1 - alpha) : alpha split of standard deviation between the two parts.
struct PolyTarget {
  Vector a;
  std::array<std::array<std::size_t, 3>, 3> monomials{};
  std::array<double, 3> weights{};
  double alpha = 0.05;
  double noise_sd = 0.05;
  double c1 = 1.0;
  double c2 = 1.0;

  double linear_part(const double* x) const {
    double s = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) s += a[k] * x[k];
    return s;
  }

  double nonlinear_part(const double* x) const {
    double s = 0.0;
    for (std::size_t t = 0; t < 3; ++t)
      s += weights[t] * x[monomials[t][0]] * x[monomials[t][1]] * x[monomials[t][2]];
    return s;
  }

  double operator()(const double* x) const { return c1 * linear_part(x) + c2 * nonlinear_part(x); }

  Vector evaluate(const MatrixRef& X) const {
    const detail::RowMatrix R = X;
    Vector f(R.rows());
    for (Eigen::Index i = 0; i < R.rows(); ++i) f[i] = (*this)(R.row(i).data());
    return f;
  }

  /// Draws a, the monomials and their weights, then calibrates c1 and c2 on
  /// `calibration` points from U([0,1]^l).
  static PolyTarget draw(std::size_t l, std::uint64_t seed, double alpha = 0.05,
                         double noise_sd = 0.05, std::size_t calibration = 100000) {
    require(l >= 3, "polynomial target needs l >= 3");
    require(alpha > 0.0 && alpha < 1.0, "polynomial target: alpha must lie in (0, 1)");
    require(calibration >= 2, "polynomial target: calibration sample too small");
    PolyTarget f;
    f.alpha = alpha;
    f.noise_sd = noise_sd;
    Stream rng(seed, 0);
    f.a.resize(static_cast<Eigen::Index>(l));
    for (Eigen::Index k = 0; k < f.a.size(); ++k) f.a[k] = rng.normal();
    for (std::size_t t = 0; t < 3; ++t) {
      const auto vars = sample_neighborhood(l, 3, rng);
      for (std::size_t r = 0; r < 3; ++r) f.monomials[t][r] = vars[r];
      f.weights[t] = rng.normal();
    }
    const Matrix Xc = uniform_matrix(static_cast<Eigen::Index>(calibration), static_cast<Eigen::Index>(l),
                                     0.0, 1.0, derive_seed(seed, {1}));
    const detail::RowMatrix R = Xc;
    Vector lin(R.rows()), non(R.rows());
    for (Eigen::Index i = 0; i < R.rows(); ++i) {
      lin[i] = f.linear_part(R.row(i).data());
      non[i] = f.nonlinear_part(R.row(i).data());
    }
    auto sd = [](const Vector& v) {
      return std::sqrt((v.array() - v.mean()).square().sum() / static_cast<double>(v.size() - 1));
    };
    const double norm = std::sqrt(alpha * alpha + (1 - alpha) * (1 - alpha));
    f.c1 = (1.0 - alpha) / norm / sd(lin);
    f.c2 = alpha / norm / sd(non);
    return f;
  }
};

// ---------------------------------------------------------------------------
// Generalization study on the polynomial target

/// How the regular-degree weight variance depends on d.
enum class PolyWeightVariance {
  inv_sqrt_d,  ///< w ~ N(0, d^{-1/2}), variance d^{-1/2}
  inv_d,       ///< w ~ N(0, 1/d)
};

struct PolytestConfig {
  std::size_t l = 16;
  std::vector<std::size_t> d_grid{1, 3, 10, 16};
  std::vector<std::size_t> n_grid{100, 200, 300, 400, 600, 800};
  std::size_t features = 4800;  ///< 300 l sin/cos features, so 2x this many columns
  std::size_t test_size = 10000;
  std::size_t folds = 5;
  std::vector<double> lambda_grid = logspace(1e-4, 1e2, 7);
  PolyWeightVariance variance = PolyWeightVariance::inv_sqrt_d;
  std::uint64_t seed = 0;
};

struct PolytestCell {
  std::size_t d;
  std::size_t n;
  double test_mse;
  double lambda;
};

struct PolytestResult {
  std::vector<PolytestCell> cells;  ///< d-major order over the grids
  double noise_floor = 0.0;

  const PolytestCell& at(std::size_t d, std::size_t n) const {
    for (const auto& c : cells)
      if (c.d == d && c.n == n) return c;
    throw validation_error("polytest: no cell for d=" + std::to_string(d) + ", n=" + std::to_string(n));
  }

  Table table() const {
    Table t({"d", "n", "test_mse", "lambda"});
    for (const auto& c : cells)
      t.add_row({static_cast<std::int64_t>(c.d), static_cast<std::int64_t>(c.n), c.test_mse, c.lambda});
    return t;
  }
};

namespace detail {
/// Streams row chunks through the feature map so the test feature matrix is never stored whole.
inline Vector predict_features(const SparseFeatureMap& map, const RidgeFit& fit, const MatrixRef& X,
                               Eigen::Index chunk = 1024) {
  Vector out(X.rows());
  for (Eigen::Index begin = 0; begin < X.rows(); begin += chunk) {
    const Eigen::Index len = std::min(chunk, X.rows() - begin);
    out.segment(begin, len) = fit.predict(apply_features(map, X.middleRows(begin, len)));
  }
  return out;
}
}  // namespace detail

/// Test MSE and CV-selected penalty for each (d, n). Training sets are nested
/// draws shared across d, and the test set is shared by all cells.
inline PolytestResult polytest_study(const PolytestConfig& cfg) {
  require(!cfg.d_grid.empty() && !cfg.n_grid.empty(), "polytest: empty grid");
  for (auto d : cfg.d_grid) require(d >= 1 && d <= cfg.l, "polytest: d must lie in [1, l]");
  for (auto n : cfg.n_grid)
    require(n >= cfg.folds, "polytest: n=" + std::to_string(n) + " is smaller than the fold count");
  require(cfg.features >= 1 && cfg.test_size >= 1, "polytest: need features and test points");

  const auto target = PolyTarget::draw(cfg.l, derive_seed(cfg.seed, {0}));
  const auto L = static_cast<Eigen::Index>(cfg.l);
  const std::size_t n_max = *std::max_element(cfg.n_grid.begin(), cfg.n_grid.end());

  auto noisy = [&](const Matrix& X, std::uint64_t s) {
    Vector y = target.evaluate(X);
    Stream rng(s, 0);
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += target.noise_sd * rng.normal();
    return y;
  };
  const Matrix X_all = uniform_matrix(static_cast<Eigen::Index>(n_max), L, 0.0, 1.0, derive_seed(cfg.seed, {1}));
  const Vector y_all = noisy(X_all, derive_seed(cfg.seed, {2}));
  const Matrix X_test = uniform_matrix(static_cast<Eigen::Index>(cfg.test_size), L, 0.0, 1.0, derive_seed(cfg.seed, {3}));
  const Vector y_test = noisy(X_test, derive_seed(cfg.seed, {4}));

  PolytestResult out;
  out.noise_floor = target.noise_sd * target.noise_sd;
  out.cells.resize(cfg.d_grid.size() * cfg.n_grid.size());
  parallel_for(out.cells.size(), [&](std::size_t c) {
    const std::size_t d = cfg.d_grid[c / cfg.n_grid.size()];
    const std::size_t n = cfg.n_grid[c % cfg.n_grid.size()];
    const double sd = cfg.variance == PolyWeightVariance::inv_sqrt_d
                          ? std::pow(static_cast<double>(d), -0.25)
                          : 1.0 / std::sqrt(static_cast<double>(d));
    const auto map = build_feature_map(cfg.l, cfg.features, DegreeSpec::regular(cfg.l, d),
                                       WeightLaw::gaussian_iso(sd, BiasLaw::phase()),
                                       Nonlinearity::sin_cos_pair(), derive_seed(cfg.seed, {5, d}));
    const auto rows = static_cast<Eigen::Index>(n);
    const Matrix F = apply_features(map, X_all.topRows(rows));
    const auto cv = ridge_cv(F, y_all.head(rows), cfg.lambda_grid, cfg.folds, derive_seed(cfg.seed, {6, n}));
    const Vector pred = detail::predict_features(map, cv.fit, X_test);
    out.cells[c] = {d, n, mse(y_test, pred), cv.best_lambda};
  });
  return out;
}

// ---------------------------------------------------------------------------
// Sparse input corruption

enum class CorruptionMode {
  per_coordinate,  ///< each entry independently replaced with probability p
  per_sample,      ///< each row wholly replaced with probability p
};

struct CorruptionSpec {
  double p = 0.03;
  double sigma = 6.0;
  CorruptionMode mode = CorruptionMode::per_coordinate;

  void validate() const {
    require(p >= 0.0 && p <= 1.0, "corruption probability must lie in [0, 1]");
    require(std::isfinite(sigma) && sigma > 0.0, "corruption sigma must be positive");
  }
};

struct CorruptedInputs {
  Matrix X;
  /// Replaced entries as (row, column), row-major order.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> mask;
};

/// Replaced entries are fresh N(0, sigma^2) draws. Row i uses substream (seed, i).
inline CorruptedInputs corrupt_inputs(const MatrixRef& X, const CorruptionSpec& spec, std::uint64_t seed) {
  spec.validate();
  CorruptedInputs out{X, {}};
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    Stream rng(seed, static_cast<std::uint64_t>(i));
    if (spec.mode == CorruptionMode::per_sample) {
      if (!rng.bernoulli(spec.p)) continue;
      for (Eigen::Index k = 0; k < X.cols(); ++k) {
        out.X(i, k) = spec.sigma * rng.normal();
        out.mask.emplace_back(i, k);
      }
    } else {
      for (Eigen::Index k = 0; k < X.cols(); ++k) {
        if (!rng.bernoulli(spec.p)) continue;
        out.X(i, k) = spec.sigma * rng.normal();
        out.mask.emplace_back(i, k);
      }
    }
  }
  return out;
}

struct StabilityConfig {
  std::size_t n = 800;
  std::size_t l = 10;
  CorruptionSpec corruption{};
  double test_fraction = 0.25;
  double trim_threshold = 3.0;
  double huber_delta = 1.35;
  double kernel_c = 1.0;
  std::vector<double> kernel_lambda_grid = logspace(1e-3, 1e3, 7);
  std::size_t folds = 5;
  std::uint64_t seed = 0;
};

struct ModelScore {
  std::string model;
  double train_r2;
  double test_r2;
};

struct StabilityResult {
  std::vector<ModelScore> scores;  ///< linear, kernel, trim+linear, huber
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  double kernel_lambda = 0.0;
  std::size_t huber_iterations = 0;

  const ModelScore& score(const std::string& model) const {
    for (const auto& s : scores)
      if (s.model == model) return s;
    throw validation_error("stability: no model '" + model + "'");
  }

  Table table() const {
    Table t({"model", "train_r2", "test_r2"});
    for (const auto& s : scores) t.add_row({s.model, s.train_r2, s.test_r2});
    return t;
  }
};

/// Linear data y = X beta with x ~ N(0, I), beta ~ N(0, I); inputs of both splits
/// are corrupted, and every model is scored on the corrupted held-out rows. The
/// trimmed model applies its training trim rule to the held-out rows as well and
/// is scored on the rows it keeps.
inline StabilityResult stability_study(const StabilityConfig& cfg) {
  cfg.corruption.validate();
  require(cfg.l >= 1, "stability: l must be positive");
  require(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0, "stability: test fraction must lie in (0, 1)");
  const auto n_test = static_cast<Eigen::Index>(std::llround(cfg.test_fraction * static_cast<double>(cfg.n)));
  const Eigen::Index n_train = static_cast<Eigen::Index>(cfg.n) - n_test;
  require(n_test >= 2 && n_train > static_cast<Eigen::Index>(cfg.l) + 1, "stability: too few samples for the split");

  const auto L = static_cast<Eigen::Index>(cfg.l);
  const Matrix X = gaussian_matrix(static_cast<Eigen::Index>(cfg.n), L, 1.0, derive_seed(cfg.seed, {0}));
  Vector beta(L);
  {
    Stream rng(derive_seed(cfg.seed, {1}), 0);
    for (Eigen::Index k = 0; k < L; ++k) beta[k] = rng.normal();
  }
  const Vector y = X * beta;
  const Matrix W = corrupt_inputs(X, cfg.corruption, derive_seed(cfg.seed, {2})).X;

  const Matrix Wtr = W.topRows(n_train), Wte = W.bottomRows(n_test);
  const Vector ytr = y.head(n_train), yte = y.tail(n_test);

  StabilityResult out;
  out.n_train = static_cast<std::size_t>(n_train);
  out.n_test = static_cast<std::size_t>(n_test);

  const auto lin = linear_ols(Wtr, ytr);
  out.scores.push_back({"linear", lin.diagnostics.train_r2, r2_score(yte, lin.predict(Wte))});

  const auto kernel = KernelSpec::sparse_sign_d1(cfg.kernel_c);
  const Matrix G = gram_matrix(kernel, Wtr);
  const auto kcv = kernel_ridge_cv(G, ytr, cfg.kernel_lambda_grid, cfg.folds, derive_seed(cfg.seed, {3}));
  out.kernel_lambda = kcv.best_lambda;
  out.scores.push_back({"kernel", r2_score(ytr, kcv.fit.predict(G)),
                        r2_score(yte, kcv.fit.predict(cross_gram(kernel, Wte, Wtr)))});

  const auto rule = TrimRule::fit(Wtr, cfg.trim_threshold);
  const auto trim = trimmed_linear(Wtr, ytr, cfg.trim_threshold);
  const auto kept_test = rule.kept_rows(Wte);
  require(kept_test.size() >= 2, "stability: trimming removed the held-out set");
  const Matrix Wte_kept = Wte(kept_test, Eigen::all);
  const Vector yte_kept = yte(kept_test);
  out.scores.push_back({"trim+linear", trim.diagnostics.train_r2, r2_score(yte_kept, trim.predict(Wte_kept))});

  RidgeFit hub;
  try {
    hub = huber_fit(Wtr, ytr, cfg.huber_delta);
  } catch (const convergence_error& e) {
    hub = e.last_iterate();
  }
  out.huber_iterations = hub.diagnostics.iterations;
  out.scores.push_back({"huber", hub.diagnostics.train_r2, r2_score(yte, hub.predict(Wte))});
  return out;
}

// ---------------------------------------------------------------------------
// Kernel eigenvalue amplification

struct AmplificationSeries {
  double p;
  double sigma;
  /// 10 log10(|noisy_i| / |clean_i|) with eigenvalues sorted by magnitude, descending.
  /// +inf where the clean eigenvalue is exactly zero.
  std::vector<double> db;

  double mean_all() const { return mean_of(db.size(), false); }
  double mean_abs_top(std::size_t k) const { return mean_of(std::min(k, db.size()), true); }

 private:
  double mean_of(std::size_t count, bool absolute) const {
    double s = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < count; ++i) {
      if (!std::isfinite(db[i])) continue;
      s += absolute ? std::abs(db[i]) : db[i];
      ++used;
    }
    return used ? s / static_cast<double>(used) : std::numeric_limits<double>::quiet_NaN();
  }
};

inline std::vector<double> eigenvalues_by_magnitude(const MatrixRef& G) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(G, Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::stable_sort(ev.begin(), ev.end(), [](double a, double b) { return std::abs(a) > std::abs(b); });
  return ev;
}

/// For each (p, sigma) the dB ratio of the corrupted Gram spectrum to the clean one.
/// Configuration c corrupts X with substream derive_seed(seed, {c}).
inline std::vector<AmplificationSeries> eigen_amplification(
    const MatrixRef& X, const std::vector<std::pair<double, double>>& configs, const KernelSpec& kernel,
    std::uint64_t seed, CorruptionMode mode = CorruptionMode::per_coordinate) {
  const auto clean = eigenvalues_by_magnitude(gram_matrix(kernel, X));
  std::vector<AmplificationSeries> out(configs.size());
  parallel_for(configs.size(), [&](std::size_t c) {
    const auto [p, sigma] = configs[c];
    const auto noisy_x = corrupt_inputs(X, {p, sigma, mode}, derive_seed(seed, {c})).X;
    const auto noisy = eigenvalues_by_magnitude(gram_matrix(kernel, noisy_x));
    AmplificationSeries s{p, sigma, std::vector<double>(clean.size())};
    for (std::size_t i = 0; i < clean.size(); ++i)
      s.db[i] = clean[i] == 0.0 ? std::numeric_limits<double>::infinity()
                                : 10.0 * std::log10(std::abs(noisy[i]) / std::abs(clean[i]));
    out[c] = std::move(s);
  });
  return out;
}

struct EigenStudyConfig {
  std::size_t n = 800;
  std::size_t l = 10;
  double kernel_c = 1.0;
  CorruptionMode mode = CorruptionMode::per_coordinate;
  /// Zero-corruption control, the p sweep at sigma = 6, the sigma sweep at p = 0.03.
  std::vector<std::pair<double, double>> configs{{0.0, 6.0},  {0.03, 6.0}, {0.2, 6.0}, {0.5, 6.0},
                                                 {0.03, 2.0}, {0.03, 10.0}};
  std::uint64_t seed = 0;
};

inline std::vector<AmplificationSeries> eigen_study(const EigenStudyConfig& cfg) {
  const Matrix X = gaussian_matrix(static_cast<Eigen::Index>(cfg.n), static_cast<Eigen::Index>(cfg.l), 1.0,
                                   derive_seed(cfg.seed, {0}));
  return eigen_amplification(X, cfg.configs, KernelSpec::sparse_sign_d1(cfg.kernel_c),
                             derive_seed(cfg.seed, {1}), cfg.mode);
}

inline Table amplification_table(const std::vector<AmplificationSeries>& series) {
  Table t({"p", "sigma", "rank", "amplification_db"});
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.db.size(); ++i)
      t.add_row({s.p, s.sigma, static_cast<std::int64_t>(i), s.db[i]});
  return t;
}

// ---------------------------------------------------------------------------
// Output contract: <dir>/<name>.csv and <dir>/<name>.meta.json

inline void write_study(const std::filesystem::path& dir, const std::string& name, const Table& table,
                        nlohmann::json config) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / (name + ".csv"), std::ios::binary);
    if (!csv) throw numerical_error("cannot write " + (dir / (name + ".csv")).string());
    table.write(csv);
  }
  nlohmann::json meta{{"study", name},
                      {"config", std::move(config)},
                      {"rows", table.size()},
                      {"columns", table.columns()},
                      {"version", kVersion}};
  std::ofstream js(dir / (name + ".meta.json"), std::ios::binary);
  if (!js) throw numerical_error("cannot write " + (dir / (name + ".meta.json")).string());
  js << meta.dump(2) << '\n';
}

}  // namespace sparsekern
