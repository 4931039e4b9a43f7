#pragma once

// Linear readouts: ridge regression on feature matrices (primal or dual solve),
// cross-validated penalty selection, kernel ridge regression on Gram matrices and
// the robust linear baselines used in the input-corruption study.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "sparsekern/csv.hpp"
#include "sparsekern/error.hpp"
#include "sparsekern/parallel.hpp"
#include "sparsekern/rng.hpp"

namespace sparsekern {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using MatrixRef = Eigen::Ref<const Matrix>;
using VectorRef = Eigen::Ref<const Vector>;

inline double mse(const VectorRef& y_true, const VectorRef& y_pred) {
  require(y_true.size() == y_pred.size(), "mse: length mismatch");
  require(y_true.size() > 0, "mse: empty input");
  return (y_true - y_pred).squaredNorm() / static_cast<double>(y_true.size());
}

/// 1 - SS_res / SS_tot. Throws for constant y_true.
inline double r2_score(const VectorRef& y_true, const VectorRef& y_pred) {
  require(y_true.size() == y_pred.size(), "r2_score: length mismatch");
  require(y_true.size() > 0, "r2_score: empty input");
  const double ss_tot = (y_true.array() - y_true.mean()).square().sum();
  if (ss_tot == 0.0) throw validation_error("r2_score: y_true has zero variance");
  return 1.0 - (y_true - y_pred).squaredNorm() / ss_tot;
}

struct FitDiagnostics {
  double train_mse = 0.0;
  /// Reported as 0 when the training targets are constant.
  double train_r2 = 0.0;
  std::size_t samples_used = 0;
  std::size_t iterations = 0;
};

/// f(x) = intercept + coefficients . x
struct RidgeFit {
  Vector coefficients;
  double intercept = 0.0;
  double lambda = 0.0;
  FitDiagnostics diagnostics;

  /// Row-by-row sums in a fixed order so identical inputs give identical bits.
  Vector predict(const MatrixRef& F) const {
    require(F.cols() == coefficients.size(),
            "predict: input has " + std::to_string(F.cols()) + " columns, model expects " +
                std::to_string(coefficients.size()));
    Vector out = Vector::Constant(F.rows(), intercept);
    for (Eigen::Index j = 0; j < F.cols(); ++j) out.noalias() += coefficients[j] * F.col(j);
    return out;
  }
};

struct RidgeOptions {
  bool fit_intercept = true;
};

namespace detail {
inline FitDiagnostics diagnose(const RidgeFit& fit, const MatrixRef& F, const VectorRef& y) {
  FitDiagnostics d;
  d.samples_used = static_cast<std::size_t>(y.size());
  const Vector pred = fit.predict(F);
  d.train_mse = mse(y, pred);
  const double ss_tot = (y.array() - y.mean()).square().sum();
  d.train_r2 = ss_tot == 0.0 ? 0.0 : 1.0 - (y - pred).squaredNorm() / ss_tot;
  return d;
}

struct Centered {
  Matrix F;
  Vector y;
  Eigen::RowVectorXd f_mean;
  double y_mean = 0.0;
};

inline Centered center(const MatrixRef& F, const VectorRef& y, bool fit_intercept) {
  Centered c{F, y, Eigen::RowVectorXd::Zero(F.cols()), 0.0};
  if (fit_intercept && F.rows() > 0) {
    c.f_mean = F.colwise().mean();
    c.y_mean = y.mean();
    c.F.rowwise() -= c.f_mean;
    c.y.array() -= c.y_mean;
  }
  return c;
}
}  // namespace detail

/// Solves (F^T F + lambda I) alpha = F^T y on centered data (when fitting an intercept).
/// Uses the m'-dimensional system when m' <= n, otherwise the equivalent n-dimensional
/// dual system alpha = F^T (F F^T + lambda I)^{-1} y.
inline RidgeFit ridge_fit(const MatrixRef& F, const VectorRef& y, double lambda,
                          RidgeOptions opts = {}) {
  require(F.rows() == y.size(), "ridge_fit: F has " + std::to_string(F.rows()) + " rows but y has " +
                                    std::to_string(y.size()) + " entries");
  require(F.rows() >= 1, "ridge_fit: need at least one sample");
  require(std::isfinite(lambda) && lambda >= 0.0, "ridge_fit: lambda must be nonnegative");
  const auto c = detail::center(F, y, opts.fit_intercept);
  const Eigen::Index n = F.rows(), m = F.cols();

  RidgeFit fit;
  fit.lambda = lambda;
  const char* singular_msg = "ridge_fit: normal equations are singular at lambda = 0; use lambda > 0";
  if (m <= n) {
    Matrix A = Matrix::Zero(m, m);
    A.selfadjointView<Eigen::Lower>().rankUpdate(c.F.transpose());
    A.diagonal().array() += lambda;
    Eigen::LLT<Matrix> llt(A.selfadjointView<Eigen::Lower>());
    if (llt.info() != Eigen::Success || llt.rcond() < 1e-13) throw numerical_error(singular_msg);
    fit.coefficients = llt.solve(c.F.transpose() * c.y);
  } else {
    if (lambda == 0.0) throw numerical_error(singular_msg);
    Matrix K = Matrix::Zero(n, n);
    K.selfadjointView<Eigen::Lower>().rankUpdate(c.F);
    K.diagonal().array() += lambda;
    Eigen::LLT<Matrix> llt(K.selfadjointView<Eigen::Lower>());
    if (llt.info() != Eigen::Success) throw numerical_error(singular_msg);
    fit.coefficients = c.F.transpose() * llt.solve(c.y);
  }
  fit.intercept = opts.fit_intercept ? c.y_mean - c.f_mean.dot(fit.coefficients) : 0.0;
  fit.diagnostics = detail::diagnose(fit, F, y);
  return fit;
}

/// Ordinary least squares with intercept on raw inputs.
inline RidgeFit linear_ols(const MatrixRef& X, const VectorRef& y) { return ridge_fit(X, y, 0.0); }

/// count points geometrically spaced from lo to hi inclusive.
inline std::vector<double> logspace(double lo, double hi, std::size_t count) {
  require(lo > 0.0 && hi > 0.0 && count >= 1, "logspace: need positive bounds and count >= 1");
  std::vector<double> out(count);
  const double a = std::log10(lo), b = std::log10(hi);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    out[i] = std::pow(10.0, a + t * (b - a));
  }
  out.front() = lo;
  if (count > 1) out.back() = hi;
  return out;
}

/// fold[i] in [0, k): seeded shuffle, then contiguous blocks whose sizes differ by at most one.
inline std::vector<std::size_t> fold_assignment(std::size_t n, std::size_t k, std::uint64_t seed) {
  require(k >= 2, "cross-validation needs at least 2 folds");
  require(n >= k, "cross-validation: " + std::to_string(n) + " samples is fewer than " +
                      std::to_string(k) + " folds");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Stream rng(seed, 0x666f6c6473ull);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  std::vector<std::size_t> fold(n);
  const std::size_t base = n / k, extra = n % k;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    for (std::size_t r = 0; r < size; ++r) fold[perm[pos++]] = f;
  }
  return fold;
}

struct CvResult {
  double best_lambda = 0.0;
  std::vector<double> lambdas;
  std::vector<double> mean_validation_mse;
  RidgeFit fit;
};

namespace detail {
inline std::vector<Eigen::Index> rows_where(const std::vector<std::size_t>& fold, std::size_t f, bool in) {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < fold.size(); ++i)
    if ((fold[i] == f) == in) out.push_back(static_cast<Eigen::Index>(i));
  return out;
}

inline std::size_t argmin_first(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] < v[best]) best = i;
  return best;
}

/// Validation MSE for every lambda given a fold's eigensystem: eigenvalues ev, spectral
/// targets s, and P mapping spectral coordinates to centered validation predictions.
inline std::vector<double> spectral_errors(const Vector& ev, const Vector& s, const Matrix& P,
                                           const Vector& yval, double y_mean,
                                           const std::vector<double>& lambdas) {
  const double tiny = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  std::vector<double> errs(lambdas.size());
  for (std::size_t t = 0; t < lambdas.size(); ++t) {
    const Vector denom = ev.array() + lambdas[t];
    if ((denom.array() <= tiny).any()) {
      errs[t] = std::numeric_limits<double>::infinity();
      continue;
    }
    const Vector pred = P * s.cwiseQuotient(denom);
    errs[t] = (yval.array() - y_mean - pred.array()).square().mean();
  }
  return errs;
}

/// Primal fold: eigendecomposition of the m' x m' normal matrix.
inline std::vector<double> ridge_fold_errors(const MatrixRef& F, const VectorRef& y,
                                             const std::vector<Eigen::Index>& train,
                                             const std::vector<Eigen::Index>& val,
                                             const std::vector<double>& lambdas, bool fit_intercept) {
  const Matrix Ftr = F(train, Eigen::all);
  const Vector ytr = y(train);
  const auto c = center(Ftr, ytr, fit_intercept);
  Matrix Fval = F(val, Eigen::all);
  Fval.rowwise() -= c.f_mean;
  Matrix A = c.F.transpose() * c.F;
  Eigen::SelfAdjointEigenSolver<Matrix> es(A);
  const Vector s = es.eigenvectors().transpose() * (c.F.transpose() * c.y);
  const Matrix P = Fval * es.eigenvectors();
  return spectral_errors(es.eigenvalues(), s, P, y(val), c.y_mean, lambdas);
}

/// Dual fold from the uncentered Gram G = F F^T of all rows; centering is applied to
/// the train block and the validation/train cross block.
inline std::vector<double> dual_fold_errors(const Matrix& G, const VectorRef& y,
                                            const std::vector<Eigen::Index>& train,
                                            const std::vector<Eigen::Index>& val,
                                            const std::vector<double>& lambdas, bool fit_intercept) {
  Matrix Gtt = G(train, train);
  Matrix Gvt = G(val, train);
  Vector ytr = y(train);
  double y_mean = 0.0;
  if (fit_intercept) {
    y_mean = ytr.mean();
    ytr.array() -= y_mean;
    const Vector col_mean = Gtt.colwise().mean().transpose();
    const double all_mean = col_mean.mean();
    const Vector val_mean = Gvt.rowwise().mean();
    Gtt.rowwise() -= col_mean.transpose();
    Gtt.colwise() -= col_mean;
    Gtt.array() += all_mean;
    Gvt.rowwise() -= col_mean.transpose();
    Gvt.colwise() -= val_mean;
    Gvt.array() += all_mean;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(Gtt);
  const Vector s = es.eigenvectors().transpose() * ytr;
  const Matrix P = Gvt * es.eigenvectors();
  return spectral_errors(es.eigenvalues(), s, P, y(val), y_mean, lambdas);
}
}  // namespace detail

/// k-fold CV over the grid (seeded folds), then a refit on all rows at the winner.
/// Ties go to the earliest grid entry.
inline CvResult ridge_cv(const MatrixRef& F, const VectorRef& y, const std::vector<double>& grid,
                         std::size_t k_folds, std::uint64_t seed, RidgeOptions opts = {}) {
  require(!grid.empty(), "ridge_cv: lambda grid is empty");
  for (double v : grid) require(std::isfinite(v) && v >= 0.0, "ridge_cv: lambdas must be nonnegative");
  require(F.rows() == y.size(), "ridge_cv: row count mismatch");
  const auto n = static_cast<std::size_t>(y.size());
  const auto fold = fold_assignment(n, k_folds, seed);

  std::size_t max_train = 0;
  for (std::size_t f = 0; f < k_folds; ++f)
    max_train = std::max(max_train, n - static_cast<std::size_t>(std::count(fold.begin(), fold.end(), f)));
  const bool dual = static_cast<std::size_t>(F.cols()) > max_train;
  Matrix G;
  if (dual) {
    G = Matrix::Zero(F.rows(), F.rows());
    G.selfadjointView<Eigen::Lower>().rankUpdate(F);
    G.triangularView<Eigen::StrictlyUpper>() = G.transpose();
  }

  std::vector<std::vector<double>> per_fold(k_folds);
  parallel_for(k_folds, [&](std::size_t f) {
    const auto train = detail::rows_where(fold, f, false);
    const auto val = detail::rows_where(fold, f, true);
    per_fold[f] = dual ? detail::dual_fold_errors(G, y, train, val, grid, opts.fit_intercept)
                       : detail::ridge_fold_errors(F, y, train, val, grid, opts.fit_intercept);
  });

  CvResult out;
  out.lambdas = grid;
  out.mean_validation_mse.assign(grid.size(), 0.0);
  for (std::size_t f = 0; f < k_folds; ++f)
    for (std::size_t t = 0; t < grid.size(); ++t) out.mean_validation_mse[t] += per_fold[f][t] / static_cast<double>(k_folds);
  out.best_lambda = grid[detail::argmin_first(out.mean_validation_mse)];
  out.fit = ridge_fit(F, y, out.best_lambda, opts);
  return out;
}

/// Dual coefficients of kernel ridge regression: (G + lambda I) beta = y.
struct KernelRidgeFit {
  Vector dual;
  double lambda = 0.0;

  /// K_new is |new| x n_train with entries k(x_new, x_train).
  Vector predict(const MatrixRef& K_new) const {
    require(K_new.cols() == dual.size(), "kernel ridge predict: cross-kernel has wrong width");
    return K_new * dual;
  }
};

namespace detail {
inline void check_symmetric(const MatrixRef& G, const char* who) {
  require(G.rows() == G.cols(), std::string(who) + ": Gram matrix must be square");
  const double mag = std::max(1.0, G.cwiseAbs().maxCoeff());
  require((G - G.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * mag,
          std::string(who) + ": Gram matrix must be symmetric");
}
}  // namespace detail

inline KernelRidgeFit kernel_ridge_fit(const MatrixRef& G, const VectorRef& y, double lambda) {
  detail::check_symmetric(G, "kernel_ridge_fit");
  require(G.rows() == y.size(), "kernel_ridge_fit: Gram/target size mismatch");
  require(std::isfinite(lambda) && lambda > 0.0, "kernel_ridge_fit: lambda must be positive");
  Matrix A = G;
  A.diagonal().array() += lambda;
  // G may be indefinite for kernels used outside their generative domain; LU handles that.
  Eigen::PartialPivLU<Matrix> lu(A);
  KernelRidgeFit fit{lu.solve(y), lambda};
  if (!fit.dual.allFinite()) throw numerical_error("kernel_ridge_fit: singular system");
  return fit;
}

struct KernelCvResult {
  double best_lambda = 0.0;
  std::vector<double> lambdas;
  std::vector<double> mean_validation_mse;
  KernelRidgeFit fit;
};

/// k-fold CV of kernel ridge on a precomputed Gram matrix.
inline KernelCvResult kernel_ridge_cv(const MatrixRef& G, const VectorRef& y,
                                      const std::vector<double>& grid, std::size_t k_folds,
                                      std::uint64_t seed) {
  detail::check_symmetric(G, "kernel_ridge_cv");
  require(!grid.empty(), "kernel_ridge_cv: lambda grid is empty");
  for (double v : grid) require(v > 0.0, "kernel_ridge_cv: lambdas must be positive");
  const auto n = static_cast<std::size_t>(y.size());
  const auto fold = fold_assignment(n, k_folds, seed);

  std::vector<std::vector<double>> per_fold(k_folds);
  parallel_for(k_folds, [&](std::size_t f) {
    const auto tr = detail::rows_where(fold, f, false);
    const auto va = detail::rows_where(fold, f, true);
    const Matrix Gtt = G(tr, tr);
    const Matrix Gvt = G(va, tr);
    Eigen::SelfAdjointEigenSolver<Matrix> es(Gtt);
    const Vector s = es.eigenvectors().transpose() * y(tr);
    const Matrix P = Gvt * es.eigenvectors();
    const Vector yv = y(va);
    auto& errs = per_fold[f];
    errs.resize(grid.size());
    for (std::size_t t = 0; t < grid.size(); ++t) {
      const Vector denom = es.eigenvalues().array() + grid[t];
      if ((denom.array().abs() <= 1e-12).any()) {
        errs[t] = std::numeric_limits<double>::infinity();
        continue;
      }
      errs[t] = (yv - P * s.cwiseQuotient(denom)).squaredNorm() / static_cast<double>(yv.size());
    }
  });

  KernelCvResult out;
  out.lambdas = grid;
  out.mean_validation_mse.assign(grid.size(), 0.0);
  for (std::size_t f = 0; f < k_folds; ++f)
    for (std::size_t t = 0; t < grid.size(); ++t) out.mean_validation_mse[t] += per_fold[f][t] / static_cast<double>(k_folds);
  out.best_lambda = grid[detail::argmin_first(out.mean_validation_mse)];
  out.fit = kernel_ridge_fit(G, y, out.best_lambda);
  return out;
}

/// Rows whose standardized coordinates all satisfy |z| <= threshold.
/// Standardization uses the column mean and (n-1) standard deviation of X.
struct TrimRule {
  Eigen::RowVectorXd center;
  Eigen::RowVectorXd scale;
  double threshold = 3.0;

  static TrimRule fit(const MatrixRef& X, double threshold) {
    require(threshold > 0.0, "trim threshold must be positive");
    require(X.rows() >= 2, "trimming needs at least two samples");
    TrimRule r;
    r.threshold = threshold;
    r.center = X.colwise().mean();
    r.scale = ((X.rowwise() - r.center).array().square().colwise().sum() / static_cast<double>(X.rows() - 1))
                  .sqrt()
                  .matrix();
    return r;
  }

  bool keeps(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      if (scale[k] == 0.0) continue;
      if (std::abs((x[k] - center[k]) / scale[k]) > threshold) return false;
    }
    return true;
  }

  std::vector<Eigen::Index> kept_rows(const MatrixRef& X) const {
    std::vector<Eigen::Index> out;
    for (Eigen::Index i = 0; i < X.rows(); ++i)
      if (keeps(X.row(i))) out.push_back(i);
    return out;
  }
};

/// Drops samples with any |standardized coordinate| > z_thresh, then OLS.
inline RidgeFit trimmed_linear(const MatrixRef& X, const VectorRef& y, double z_thresh = 3.0) {
  require(X.rows() == y.size(), "trimmed_linear: row count mismatch");
  const auto rule = TrimRule::fit(X, z_thresh);
  const auto kept = rule.kept_rows(X);
  if (kept.empty()) throw validation_error("trimmed_linear: every sample was trimmed");
  const Matrix Xk = X(kept, Eigen::all);
  const Vector yk = y(kept);
  return linear_ols(Xk, yk);
}

/// Non-convergence of an iterative fit; carries the last iterate.
class convergence_error : public numerical_error {
 public:
  convergence_error(const std::string& what, RidgeFit last)
      : numerical_error(what), last_(std::move(last)) {}
  const RidgeFit& last_iterate() const noexcept { return last_; }

 private:
  RidgeFit last_;
};

namespace detail {
inline double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
  return m;
}

inline RidgeFit weighted_ols(const MatrixRef& X, const VectorRef& y, const Vector& w) {
  const double wsum = w.sum();
  const Eigen::RowVectorXd xm = (X.array().colwise() * w.array()).colwise().sum() / wsum;
  const double ym = w.dot(y) / wsum;
  const Matrix Xc = X.rowwise() - xm;
  const Vector yc = y.array() - ym;
  const Matrix Xw = Xc.array().colwise() * w.array().sqrt();
  Matrix A = Matrix::Zero(X.cols(), X.cols());
  A.selfadjointView<Eigen::Lower>().rankUpdate(Xw.transpose());
  Eigen::LLT<Matrix> llt(A.selfadjointView<Eigen::Lower>());
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-13)
    throw numerical_error("huber_fit: weighted normal equations are singular");
  RidgeFit fit;
  fit.coefficients = llt.solve(Xc.transpose() * (w.array() * yc.array()).matrix());
  fit.intercept = ym - xm.dot(fit.coefficients);
  return fit;
}
}  // namespace detail

/// Huber regression by iteratively reweighted least squares. Residuals are measured
/// in units of a MAD scale estimate refreshed every iteration; delta is the transition
/// point in those units. Converged when no coefficient moves by 1e-8 or more.
inline RidgeFit huber_fit(const MatrixRef& X, const VectorRef& y, double delta = 1.35,
                          std::size_t max_iterations = 200) {
  require(delta > 0.0, "huber_fit: delta must be positive");
  require(X.rows() == y.size(), "huber_fit: row count mismatch");
  require(X.rows() > X.cols(), "huber_fit: need more samples than inputs");
  const Eigen::Index n = X.rows();
  RidgeFit fit = detail::weighted_ols(X, y, Vector::Ones(n));
  const double y_mag = 1.0 + y.cwiseAbs().maxCoeff();

  for (std::size_t it = 1; it <= max_iterations; ++it) {
    const Vector r = y - fit.predict(X);
    std::vector<double> rv(r.data(), r.data() + n);
    const double med = detail::median(rv);
    for (auto& v : rv) v = std::abs(v - med);
    const double scale = 1.482602218505602 * detail::median(rv);
    if (scale <= 1e-14 * y_mag) {  // residuals already (almost all) zero
      fit.diagnostics = detail::diagnose(fit, X, y);
      fit.diagnostics.iterations = it;
      return fit;
    }
    Vector w(n);
    const double cut = delta * scale;
    for (Eigen::Index i = 0; i < n; ++i) w[i] = std::abs(r[i]) <= cut ? 1.0 : cut / std::abs(r[i]);
    RidgeFit next = detail::weighted_ols(X, y, w);
    const double change = std::max((next.coefficients - fit.coefficients).cwiseAbs().maxCoeff(),
                                   std::abs(next.intercept - fit.intercept));
    fit = std::move(next);
    if (change < 1e-8) {
      fit.diagnostics = detail::diagnose(fit, X, y);
      fit.diagnostics.iterations = it;
      return fit;
    }
  }
  fit.diagnostics = detail::diagnose(fit, X, y);
  fit.diagnostics.iterations = max_iterations;
  throw convergence_error("huber_fit: no convergence after " + std::to_string(max_iterations) +
                              " iterations",
                          fit);
}

inline void to_json(nlohmann::json& j, const RidgeFit& fit) {
  j = nlohmann::json{
      {"lambda", fit.lambda},
      {"intercept", fit.intercept},
      {"coefficients", std::vector<double>(fit.coefficients.data(),
                                           fit.coefficients.data() + fit.coefficients.size())},
      {"diagnostics",
       {{"train_mse", fit.diagnostics.train_mse},
        {"train_r2", fit.diagnostics.train_r2},
        {"samples_used", fit.diagnostics.samples_used},
        {"iterations", fit.diagnostics.iterations}}}};
}

inline RidgeFit ridge_fit_from_json(const nlohmann::json& j) {
  try {
    RidgeFit fit;
    fit.lambda = j.at("lambda").get<double>();
    fit.intercept = j.at("intercept").get<double>();
    const auto c = j.at("coefficients").get<std::vector<double>>();
    fit.coefficients = Eigen::Map<const Vector>(c.data(), static_cast<Eigen::Index>(c.size()));
    const auto& d = j.at("diagnostics");
    fit.diagnostics.train_mse = d.at("train_mse").get<double>();
    fit.diagnostics.train_r2 = d.at("train_r2").get<double>();
    fit.diagnostics.samples_used = d.value("samples_used", std::size_t{0});
    fit.diagnostics.iterations = d.value("iterations", std::size_t{0});
    return fit;
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("malformed fit JSON: ") + e.what());
  }
}

/// n x l inputs with a length-n target.
struct Dataset {
  Matrix X;
  Vector y;
  std::vector<std::string> columns;
  std::string target;

  void validate() const {
    require(X.rows() >= 1, "dataset: need at least one row");
    require(X.rows() == y.size(), "dataset: X and y row counts differ");
    require(X.allFinite() && y.allFinite(), "dataset: non-finite entries");
    require(columns.empty() || columns.size() == static_cast<std::size_t>(X.cols()),
            "dataset: column names do not match X");
  }
};

/// Headered CSV; the target is the named column, or the last column when target is empty.
inline Dataset load_dataset(const std::string& path, const std::string& target = "") {
  auto csv = read_numeric_csv(path);
  require(csv.header.size() >= 2, "dataset '" + path + "' needs at least one input and a target column");
  std::size_t t = csv.header.size() - 1;
  if (!target.empty()) {
    const auto it = std::find(csv.header.begin(), csv.header.end(), target);
    require(it != csv.header.end(), "target column '" + target + "' not found in '" + path + "'");
    t = static_cast<std::size_t>(it - csv.header.begin());
  }
  Dataset ds;
  ds.target = csv.header[t];
  std::vector<Eigen::Index> inputs;
  for (std::size_t c = 0; c < csv.header.size(); ++c)
    if (c != t) {
      inputs.push_back(static_cast<Eigen::Index>(c));
      ds.columns.push_back(csv.header[c]);
    }
  ds.X = csv.values(Eigen::all, inputs);
  ds.y = csv.values.col(static_cast<Eigen::Index>(t));
  ds.validate();
  return ds;
}

}  // namespace sparsekern
