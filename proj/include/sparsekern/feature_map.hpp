#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sparsekern/degree.hpp"
#include "sparsekern/error.hpp"
#include "sparsekern/nonlinearity.hpp"
#include "sparsekern/parallel.hpp"
#include "sparsekern/rng.hpp"
#include "sparsekern/weight_law.hpp"

namespace sparsekern {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// m sparse random features phi_i(x) = scale * gain * h(sum_{k in N_i} w_ik x_k + b_i).
///
/// Stored row-per-feature in a CSR layout: feature i owns the half-open slice
/// [offsets[i], offsets[i+1]) of `indices` (sorted input coordinates) and `weights`.
/// The pre-activation is w.x + b; biases are drawn from symmetric intervals where the
/// sign convention matters, so w.x - b has the same law.
class SparseFeatureMap {
 public:
  static constexpr int kFormatVersion = 1;

  SparseFeatureMap(std::size_t l, Nonlinearity h, std::uint64_t seed,
                   std::vector<std::size_t> offsets, std::vector<std::uint32_t> indices,
                   std::vector<double> weights, std::vector<double> biases, double scale)
      : l_(l),
        h_(h),
        seed_(seed),
        scale_(scale),
        offsets_(std::move(offsets)),
        indices_(std::move(indices)),
        weights_(std::move(weights)),
        biases_(std::move(biases)) {
    validate();
  }

  std::size_t input_dim() const noexcept { return l_; }
  std::size_t feature_count() const noexcept { return biases_.size(); }
  /// Columns of the feature matrix (2m for sin/cos pairs).
  std::size_t output_dim() const noexcept { return feature_count() * h_.outputs(); }
  const Nonlinearity& nonlinearity() const noexcept { return h_; }
  std::uint64_t seed() const noexcept { return seed_; }
  double scale() const noexcept { return scale_; }

  std::size_t degree(std::size_t i) const noexcept { return offsets_[i + 1] - offsets_[i]; }
  std::span<const std::uint32_t> neighborhood(std::size_t i) const noexcept {
    return {indices_.data() + offsets_[i], degree(i)};
  }
  std::span<const double> weights(std::size_t i) const noexcept {
    return {weights_.data() + offsets_[i], degree(i)};
  }
  double bias(std::size_t i) const noexcept { return biases_[i]; }
  const std::vector<double>& biases() const noexcept { return biases_; }
  std::size_t total_connections() const noexcept { return indices_.size(); }

  std::vector<std::size_t> degrees() const {
    std::vector<std::size_t> out(feature_count());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = degree(i);
    return out;
  }

  double preactivation(std::size_t i, const double* x) const noexcept {
    double z = biases_[i];
    const std::size_t end = offsets_[i + 1];
    for (std::size_t k = offsets_[i]; k < end; ++k) z += weights_[k] * x[indices_[k]];
    return z;
  }

  /// Writes output_dim() feature values for the contiguous input x (length l).
  void features_of(const double* x, double* out) const noexcept {
    const std::size_t q = h_.outputs();
    const double g = scale_ * h_.gain();
    for (std::size_t i = 0; i < feature_count(); ++i) {
      double* o = out + i * q;
      h_.eval(preactivation(i, x), o);
      for (std::size_t r = 0; r < q; ++r) o[r] *= g;
    }
  }

  friend bool operator==(const SparseFeatureMap&, const SparseFeatureMap&) = default;

 private:
  void validate() const {
    require(l_ >= 1, "feature map: input dimension must be positive");
    const std::size_t m = biases_.size();
    require(m >= 1, "feature map: feature count must be positive");
    require(offsets_.size() == m + 1 && offsets_.front() == 0 &&
                offsets_.back() == indices_.size(),
            "feature map: inconsistent neighborhood offsets");
    require(weights_.size() == indices_.size(),
            "feature map: stored weights must equal the total in-degree");
    require(std::isfinite(scale_) && scale_ > 0.0, "feature map: scale must be positive");
    for (std::size_t i = 0; i < m; ++i) {
      require(offsets_[i] <= offsets_[i + 1], "feature map: negative degree");
      for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
        require(indices_[k] < l_, "feature map: neighbor index out of range");
        require(k == offsets_[i] || indices_[k - 1] < indices_[k],
                "feature map: neighborhoods must be strictly increasing");
      }
    }
  }

  std::size_t l_;
  Nonlinearity h_;
  std::uint64_t seed_;
  double scale_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> indices_;
  std::vector<double> weights_;
  std::vector<double> biases_;
};

/// Two-step sampling of m sparse features. Feature i draws, from its own substream
/// (seed, i) and in this order: its degree, its neighborhood, its weights, its bias.
inline SparseFeatureMap build_feature_map(std::size_t l, std::size_t m, const DegreeSpec& degrees,
                                          const WeightLaw& law, Nonlinearity h,
                                          std::uint64_t seed) {
  require(m >= 1, "feature count m must be positive");
  require(degrees.dim() == l, "degree spec dimension " + std::to_string(degrees.dim()) +
                                  " does not match input dimension " + std::to_string(l));

  struct Drawn {
    std::vector<std::uint32_t> nbrs;
    std::vector<double> w;
    double b = 0.0;
  };
  std::vector<Drawn> drawn(m);
  parallel_for(m, [&](std::size_t i) {
    Stream rng(seed, i);
    const std::size_t d = degrees.draw(rng);
    Drawn& f = drawn[i];
    f.nbrs = sample_neighborhood(l, d, rng);
    f.w.resize(d);
    for (auto& w : f.w) w = law.draw(rng, d);
    f.b = law.bias.draw(rng);
  }, 256);

  std::vector<std::size_t> offsets(m + 1, 0);
  for (std::size_t i = 0; i < m; ++i) offsets[i + 1] = offsets[i] + drawn[i].nbrs.size();
  std::vector<std::uint32_t> indices(offsets.back());
  std::vector<double> weights(offsets.back());
  std::vector<double> biases(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::copy(drawn[i].nbrs.begin(), drawn[i].nbrs.end(), indices.begin() + offsets[i]);
    std::copy(drawn[i].w.begin(), drawn[i].w.end(), weights.begin() + offsets[i]);
    biases[i] = drawn[i].b;
  }
  return SparseFeatureMap(l, h, seed, std::move(offsets), std::move(indices), std::move(weights),
                          std::move(biases), 1.0 / std::sqrt(static_cast<double>(m)));
}

namespace detail {
inline void check_columns(const SparseFeatureMap& map, Eigen::Index cols) {
  if (static_cast<std::size_t>(cols) != map.input_dim())
    throw validation_error("input has " + std::to_string(cols) + " columns but the feature map expects " +
                           std::to_string(map.input_dim()));
}

inline void copy_row(const Eigen::Ref<const Matrix>& X, Eigen::Index j, std::vector<double>& buf) {
  buf.resize(static_cast<std::size_t>(X.cols()));
  for (Eigen::Index k = 0; k < X.cols(); ++k) buf[static_cast<std::size_t>(k)] = X(j, k);
}
}  // namespace detail

/// n x output_dim() feature matrix. Cost O(n * sum_i d_i).
inline Matrix apply_features(const SparseFeatureMap& map, const Eigen::Ref<const Matrix>& X) {
  detail::check_columns(map, X.cols());
  const auto n = static_cast<std::size_t>(X.rows());
  const std::size_t q = map.output_dim();
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> F(X.rows(), q);
  parallel_chunks(n, 64, [&](std::size_t begin, std::size_t end) {
    std::vector<double> x;
    for (std::size_t j = begin; j < end; ++j) {
      detail::copy_row(X, static_cast<Eigen::Index>(j), x);
      map.features_of(x.data(), F.row(static_cast<Eigen::Index>(j)).data());
    }
  });
  return Matrix(F);
}

/// G = F F^T with F = apply_features(map, X); exactly symmetric.
inline Matrix empirical_kernel(const SparseFeatureMap& map, const Eigen::Ref<const Matrix>& X) {
  const Matrix F = apply_features(map, X);
  Matrix G = Matrix::Zero(F.rows(), F.rows());
  G.selfadjointView<Eigen::Lower>().rankUpdate(F);
  G.triangularView<Eigen::StrictlyUpper>() = G.transpose();
  return G;
}

/// phi(a_j).phi(b_j) for each row pair without materializing the feature matrix.
inline std::vector<double> kernel_estimates(const SparseFeatureMap& map,
                                            const Eigen::Ref<const Matrix>& A,
                                            const Eigen::Ref<const Matrix>& B) {
  detail::check_columns(map, A.cols());
  detail::check_columns(map, B.cols());
  require(A.rows() == B.rows(), "kernel_estimates: row counts differ");
  const auto n = static_cast<std::size_t>(A.rows());
  std::vector<double> out(n);
  const auto& h = map.nonlinearity();
  const std::size_t q = h.outputs();
  const double g2 = map.scale() * map.scale() * h.gain() * h.gain();
  parallel_for(n, [&](std::size_t j) {
    std::vector<double> a, b;
    detail::copy_row(A, static_cast<Eigen::Index>(j), a);
    detail::copy_row(B, static_cast<Eigen::Index>(j), b);
    double acc = 0.0, ha[2], hb[2];
    for (std::size_t i = 0; i < map.feature_count(); ++i) {
      h.eval(map.preactivation(i, a.data()), ha);
      h.eval(map.preactivation(i, b.data()), hb);
      for (std::size_t r = 0; r < q; ++r) acc += ha[r] * hb[r];
    }
    out[j] = g2 * acc;
  });
  return out;
}

// JSON document: {version, l, m, nonlinearity, scale, seed, degrees, neighborhoods,
// weights, biases}. Doubles are written in shortest round-trip form.

inline void to_json(nlohmann::json& j, const SparseFeatureMap& map) {
  const std::size_t m = map.feature_count();
  nlohmann::json nbrs = nlohmann::json::array(), ws = nlohmann::json::array();
  for (std::size_t i = 0; i < m; ++i) {
    const auto n = map.neighborhood(i);
    const auto w = map.weights(i);
    nbrs.push_back(std::vector<std::uint32_t>(n.begin(), n.end()));
    ws.push_back(std::vector<double>(w.begin(), w.end()));
  }
  j = nlohmann::json{{"version", SparseFeatureMap::kFormatVersion},
                     {"l", map.input_dim()},
                     {"m", m},
                     {"nonlinearity", map.nonlinearity().name()},
                     {"scale", map.scale()},
                     {"seed", map.seed()},
                     {"degrees", map.degrees()},
                     {"neighborhoods", std::move(nbrs)},
                     {"weights", std::move(ws)},
                     {"biases", map.biases()}};
}

inline SparseFeatureMap feature_map_from_json(const nlohmann::json& j) {
  try {
    require(j.at("version").get<int>() == SparseFeatureMap::kFormatVersion,
            "unsupported feature map version");
    const auto l = j.at("l").get<std::size_t>();
    const auto m = j.at("m").get<std::size_t>();
    const auto degrees = j.at("degrees").get<std::vector<std::size_t>>();
    const auto& nbrs = j.at("neighborhoods");
    const auto& ws = j.at("weights");
    auto biases = j.at("biases").get<std::vector<double>>();
    require(degrees.size() == m && nbrs.size() == m && ws.size() == m && biases.size() == m,
            "feature map arrays must all have length m");
    std::vector<std::size_t> offsets(m + 1, 0);
    std::vector<std::uint32_t> indices;
    std::vector<double> weights;
    for (std::size_t i = 0; i < m; ++i) {
      const auto n = nbrs[i].get<std::vector<std::uint32_t>>();
      const auto w = ws[i].get<std::vector<double>>();
      require(n.size() == degrees[i] && w.size() == degrees[i],
              "feature " + std::to_string(i) + ": neighborhood/weights do not match its degree");
      indices.insert(indices.end(), n.begin(), n.end());
      weights.insert(weights.end(), w.begin(), w.end());
      offsets[i + 1] = indices.size();
    }
    return SparseFeatureMap(l, Nonlinearity::parse(j.at("nonlinearity").get<std::string>()),
                            j.at("seed").get<std::uint64_t>(), std::move(offsets),
                            std::move(indices), std::move(weights), std::move(biases),
                            j.at("scale").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("malformed feature map JSON: ") + e.what());
  }
}

}  // namespace sparsekern
