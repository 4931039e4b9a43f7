#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "sparsekern/feature_map.hpp"
#include "sparsekern/parallel.hpp"

using namespace sparsekern;

namespace {

Matrix uniform_points(Eigen::Index n, Eigen::Index l, double lo, double hi, std::uint64_t seed) {
  Stream rng(seed, 0);
  Matrix X(n, l);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < l; ++k) X(i, k) = rng.uniform(lo, hi);
  return X;
}

double rbf_direct(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double sigma) {
  return std::exp(-(a - b).squaredNorm() / (2 * sigma * sigma));
}

}  // namespace

TEST_CASE("degree spec validation", "[features]") {
  CHECK_THROWS_AS(DegreeSpec::regular(4, 0), validation_error);
  CHECK_THROWS_AS(DegreeSpec::regular(4, 5), validation_error);
  CHECK_THROWS_AS(DegreeSpec::binomial(4, 1.5), validation_error);
  CHECK_THROWS_AS(DegreeSpec::binomial(4, -0.1), validation_error);
  CHECK_THROWS_AS(DegreeSpec::custom({0.5, 0.4}), validation_error);
  CHECK_THROWS_AS(DegreeSpec::custom({0.5, 0.5 + 1e-10}), validation_error);
  CHECK_THROWS_AS(DegreeSpec::custom({1.2, -0.2}), validation_error);
  CHECK_NOTHROW(DegreeSpec::custom({0.25, 0.25, 0.5}));
}

TEST_CASE("sample_degrees examples", "[features]") {
  CHECK(sample_degrees(DegreeSpec::regular(16, 3), 5, 1) == std::vector<std::size_t>(5, 3));
  CHECK(sample_degrees(DegreeSpec::binomial(4, 1.0), 3, 1) == std::vector<std::size_t>(3, 4));
  CHECK(sample_degrees(DegreeSpec::binomial(4, 0.0), 3, 1) == std::vector<std::size_t>(3, 0));

  const auto ds = sample_degrees(DegreeSpec::binomial(16, 0.25), 100000, 7);
  double mean = 0;
  for (auto d : ds) mean += static_cast<double>(d);
  mean /= static_cast<double>(ds.size());
  CHECK(std::abs(mean - 4.0) < 0.05);

  const auto cs = sample_degrees(DegreeSpec::custom({0.0, 0.3, 0.0, 0.7}), 100000, 3);
  const double frac1 = static_cast<double>(std::count(cs.begin(), cs.end(), 1)) / 1e5;
  CHECK(std::abs(frac1 - 0.3) < 4 * std::sqrt(0.21 / 1e5));
  CHECK(std::count(cs.begin(), cs.end(), 0) == 0);
  CHECK(std::count(cs.begin(), cs.end(), 2) == 0);
}

TEST_CASE("sample_neighborhood is a uniform sorted subset", "[features]") {
  Stream rng(5, 0);
  CHECK(sample_neighborhood(3, 3, rng) == std::vector<std::uint32_t>{0, 1, 2});
  CHECK(sample_neighborhood(3, 0, rng).empty());
  CHECK_THROWS_AS(sample_neighborhood(3, 4, rng), validation_error);

  const int draws = 100000;
  std::map<std::vector<std::uint32_t>, int> pairs;
  int zero = 0;
  for (int i = 0; i < draws; ++i) {
    Stream s(17, static_cast<std::uint64_t>(i));
    ++pairs[sample_neighborhood(5, 2, s)];
    zero += sample_neighborhood(2, 1, s)[0] == 0 ? 1 : 0;
  }
  CHECK(std::abs(zero / double(draws) - 0.5) < 0.01);
  REQUIRE(pairs.size() == 10u);
  for (const auto& [subset, count] : pairs) {
    CHECK(subset[0] < subset[1]);
    CHECK(std::abs(count / double(draws) - 0.1) < 0.01);
  }
}

TEST_CASE("feature map structural invariants", "[features]") {
  const auto map = build_feature_map(12, 500, DegreeSpec::binomial(12, 0.3),
                                     WeightLaw::gaussian_iso(1.0, BiasLaw::uniform(-1, 1)),
                                     Nonlinearity::sign(), 99);
  std::size_t total = 0;
  for (std::size_t i = 0; i < map.feature_count(); ++i) {
    const auto n = map.neighborhood(i);
    REQUIRE(n.size() == map.degree(i));
    REQUIRE(map.weights(i).size() == map.degree(i));
    for (std::size_t k = 0; k < n.size(); ++k) {
      REQUIRE(n[k] < 12u);
      if (k) REQUIRE(n[k - 1] < n[k]);
    }
    total += map.degree(i);
  }
  CHECK(map.total_connections() == total);
  CHECK(map.scale() == 1.0 / std::sqrt(500.0));
  CHECK(map.degrees() == sample_degrees(DegreeSpec::binomial(12, 0.3), 500, 99));

  const auto dense = build_feature_map(6, 50, DegreeSpec::regular(6, 6), WeightLaw::gaussian_iso(1.0),
                                       Nonlinearity::step(), 1);
  for (std::size_t i = 0; i < dense.feature_count(); ++i)
    CHECK(std::vector<std::uint32_t>(dense.neighborhood(i).begin(), dense.neighborhood(i).end()) ==
          std::vector<std::uint32_t>{0, 1, 2, 3, 4, 5});
}

TEST_CASE("feature map rejects inconsistent storage", "[features]") {
  CHECK_THROWS_AS(SparseFeatureMap(3, Nonlinearity::step(), 0, {0, 2}, {1, 1}, {1.0, 1.0}, {0.0}, 1.0),
                  validation_error);
  CHECK_THROWS_AS(SparseFeatureMap(3, Nonlinearity::step(), 0, {0, 1}, {3}, {1.0}, {0.0}, 1.0),
                  validation_error);
  CHECK_THROWS_AS(SparseFeatureMap(3, Nonlinearity::step(), 0, {0, 1}, {0}, {1.0, 2.0}, {0.0}, 1.0),
                  validation_error);
  CHECK_THROWS_AS(build_feature_map(3, 0, DegreeSpec::regular(3, 1), WeightLaw::gaussian_iso(1.0),
                                    Nonlinearity::step(), 0),
                  validation_error);
}

TEST_CASE("nonlinearity definitions", "[features]") {
  CHECK(Nonlinearity::step()(0.0) == 0.0);
  CHECK(Nonlinearity::step()(1e-300) == 1.0);
  CHECK(Nonlinearity::sign()(0.0) == 0.0);
  CHECK(Nonlinearity::sign()(-2.0) == -1.0);
  CHECK(Nonlinearity::threshold_poly(0) == Nonlinearity::step());
  CHECK(Nonlinearity::threshold_poly(2)(3.0) == 9.0);
  CHECK(Nonlinearity::threshold_poly(2)(-3.0) == 0.0);
  CHECK(Nonlinearity::sin_cos_pair().outputs() == 2);
  CHECK(Nonlinearity::cosine().outputs() == 1);
  for (auto h : {Nonlinearity::step(), Nonlinearity::sign(), Nonlinearity::cosine(), Nonlinearity::sin_cos_pair(),
                 Nonlinearity::exponential(), Nonlinearity::threshold_poly(3)})
    CHECK(Nonlinearity::parse(h.name()) == h);
  CHECK_THROWS_AS(Nonlinearity::parse("tanh"), validation_error);
}

TEST_CASE("apply_features matches the definition and the sparse cost model", "[features]") {
  const auto map = build_feature_map(8, 40, DegreeSpec::binomial(8, 0.4),
                                     WeightLaw::gaussian_iso(0.7, BiasLaw::phase()), Nonlinearity::sin_cos_pair(), 3);
  const Matrix X = uniform_points(5, 8, -1, 1, 4);
  const Matrix F = apply_features(map, X);
  REQUIRE(F.rows() == 5);
  REQUIRE(F.cols() == 80);
  for (Eigen::Index j = 0; j < X.rows(); ++j)
    for (std::size_t i = 0; i < map.feature_count(); ++i) {
      double z = map.bias(i);
      const auto n = map.neighborhood(i);
      const auto w = map.weights(i);
      for (std::size_t k = 0; k < n.size(); ++k) z += w[k] * X(j, n[k]);
      CHECK(F(j, 2 * i) == Catch::Approx(map.scale() * std::sin(z)).margin(1e-15));
      CHECK(F(j, 2 * i + 1) == Catch::Approx(map.scale() * std::cos(z)).margin(1e-15));
    }
  CHECK_THROWS_AS(apply_features(map, Matrix::Zero(2, 7)), validation_error);
}

TEST_CASE("step features with zero biases vanish at the origin", "[features]") {
  const auto map = build_feature_map(5, 100, DegreeSpec::regular(5, 2), WeightLaw::gaussian_iso(1.0),
                                     Nonlinearity::step(), 8);
  CHECK(apply_features(map, Matrix::Zero(1, 5)).isZero(0.0));
}

TEST_CASE("degree-zero features emit the constant h(b)", "[features]") {
  const auto map = build_feature_map(4, 200, DegreeSpec::custom({1.0, 0, 0, 0, 0}),
                                     WeightLaw::gaussian_iso(1.0, BiasLaw::uniform(-1, 1)), Nonlinearity::sign(), 2);
  const Matrix X = uniform_points(3, 4, -5, 5, 1);
  const Matrix F = apply_features(map, X);
  for (std::size_t i = 0; i < map.feature_count(); ++i) {
    const double expect = map.scale() * (map.bias(i) > 0 ? 1.0 : -1.0);
    CHECK(F(0, i) == expect);
    CHECK(F(1, i) == expect);
    CHECK(F(2, i) == expect);
  }
}

TEST_CASE("locality: one-coordinate perturbations touch only connected features", "[features]") {
  const std::size_t l = 10;
  const auto map = build_feature_map(l, 2000, DegreeSpec::binomial(l, 0.3),
                                     WeightLaw::gaussian_iso(1.0, BiasLaw::phase()), Nonlinearity::cosine(), 21);
  Stream rng(4, 4);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix X = uniform_points(1, l, -1, 1, 100 + trial);
    Matrix Y = X;
    const auto k = static_cast<std::uint32_t>(rng.below(l));
    Y(0, k) += 0.5 + rng.uniform();
    const Matrix FX = apply_features(map, X), FY = apply_features(map, Y);
    for (std::size_t i = 0; i < map.feature_count(); ++i) {
      const auto n = map.neighborhood(i);
      if (std::find(n.begin(), n.end(), k) == n.end()) REQUIRE(FX(0, i) == FY(0, i));
    }
  }
}

TEST_CASE("d=1 features: affected fraction is 1/l", "[features]") {
  const std::size_t l = 8, m = 40000;
  const auto map = build_feature_map(l, m, DegreeSpec::regular(l, 1),
                                     WeightLaw::gaussian_iso(1.0, BiasLaw::phase()), Nonlinearity::cosine(), 6);
  Matrix X = uniform_points(1, l, -1, 1, 9), Y = X;
  Y(0, 3) += 1.0;
  const Matrix FX = apply_features(map, X), FY = apply_features(map, Y);
  std::size_t changed = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const bool touches = map.neighborhood(i)[0] == 3;
    if (!touches) REQUIRE(FX(0, i) == FY(0, i));
    changed += FX(0, i) != FY(0, i) ? 1 : 0;
  }
  const double p = 1.0 / l;
  CHECK(std::abs(static_cast<double>(changed) - m * p) < 3 * std::sqrt(m * p * (1 - p)));
}

TEST_CASE("stability bound through Cauchy-Schwarz", "[features]") {
  const auto map = build_feature_map(6, 300, DegreeSpec::binomial(6, 0.5),
                                     WeightLaw::gaussian_iso(1.0, BiasLaw::uniform(-1, 1)), Nonlinearity::sign(), 12);
  Stream rng(1, 2);
  for (int t = 0; t < 50; ++t) {
    const Matrix X = uniform_points(2, 6, -1, 1, 500 + t);
    const Matrix F = apply_features(map, X);
    Vector alpha(F.cols());
    for (Eigen::Index i = 0; i < alpha.size(); ++i) alpha[i] = rng.normal();
    const Vector diff = (F.row(0) - F.row(1)).transpose();
    CHECK(std::abs(alpha.dot(diff)) <= alpha.norm() * diff.norm() * (1 + 1e-12));
  }
}

TEST_CASE("GaussianScaled keeps E|w|^2 independent of degree", "[features]") {
  const std::size_t l = 12, m = 100000;
  const auto map = build_feature_map(l, m, DegreeSpec::binomial(l, 0.5), WeightLaw::gaussian_scaled(1.0),
                                     Nonlinearity::cosine(), 77);
  double total = 0, used = 0;
  std::vector<double> sum(l + 1, 0.0), count(l + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0;
    for (double w : map.weights(i)) s += w * w;
    if (map.degree(i) == 0) continue;
    total += s;
    used += 1;
    sum[map.degree(i)] += s;
    count[map.degree(i)] += 1;
  }
  CHECK(std::abs(total / used - 1.0) < 0.02);
  for (std::size_t d = 3; d <= 9; ++d) CHECK(std::abs(sum[d] / count[d] - 1.0) < 0.05);
}

TEST_CASE("construction is independent of worker count", "[features]") {
  const auto spec = DegreeSpec::binomial(16, 0.25);
  const auto law = WeightLaw::gaussian_scaled(1.5, BiasLaw::uniform(-2, 2));
  set_thread_count(1);
  const auto a = build_feature_map(16, 1000, spec, law, Nonlinearity::sign(), 1234);
  const Matrix X = uniform_points(300, 16, -1, 1, 5);
  const Matrix Fa = apply_features(a, X);
  const Matrix Ga = empirical_kernel(a, X);
  set_thread_count(8);
  const auto b = build_feature_map(16, 1000, spec, law, Nonlinearity::sign(), 1234);
  const Matrix Fb = apply_features(b, X);
  const Matrix Gb = empirical_kernel(b, X);
  set_thread_count(0);
  CHECK(a == b);
  CHECK(nlohmann::json(a).dump() == nlohmann::json(b).dump());
  CHECK((Fa.array() == Fb.array()).all());
  CHECK((Ga.array() == Gb.array()).all());
}

TEST_CASE("feature map JSON round trip is exact", "[features]") {
  const auto map = build_feature_map(7, 64, DegreeSpec::custom({0.1, 0.2, 0.3, 0.1, 0.1, 0.1, 0.05, 0.05}),
                                     WeightLaw::gaussian_iso(0.3, BiasLaw::uniform(-0.7, 1.9)),
                                     Nonlinearity::threshold_poly(2), 0xFFFFFFFFFFFFFFFFull);
  const nlohmann::json j = map;
  const auto back = feature_map_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back == map);
  CHECK(j.at("version") == 1);
  CHECK(j.at("seed").get<std::uint64_t>() == 0xFFFFFFFFFFFFFFFFull);
  nlohmann::json bad = j;
  bad["version"] = 2;
  CHECK_THROWS_AS(feature_map_from_json(bad), validation_error);
  bad = j;
  bad["neighborhoods"][0] = std::vector<int>(map.degree(0) + 1, 0);
  CHECK_THROWS_AS(feature_map_from_json(bad), validation_error);
}

TEST_CASE("empirical kernel is a symmetric PSD Gram", "[features]") {
  const auto map = build_feature_map(5, 400, DegreeSpec::regular(5, 2),
                                     WeightLaw::gaussian_iso(1.0, BiasLaw::phase()), Nonlinearity::cosine(), 10);
  const Matrix X1 = uniform_points(1, 5, -1, 1, 2);
  const Matrix G1 = empirical_kernel(map, X1);
  CHECK(G1(0, 0) == Catch::Approx(apply_features(map, X1).squaredNorm()).epsilon(1e-14));
  CHECK(G1(0, 0) >= 0);

  const Matrix X = uniform_points(60, 5, -1, 1, 3);
  const Matrix G = empirical_kernel(map, X);
  CHECK((G.array() == G.transpose().array()).all());
  Eigen::SelfAdjointEigenSolver<Matrix> es(G);
  CHECK(es.eigenvalues().minCoeff() >= -1e-8 * es.eigenvalues().cwiseAbs().maxCoeff());

  const auto est = kernel_estimates(map, X.topRows(10), X.bottomRows(10));
  for (int j = 0; j < 10; ++j) CHECK(est[j] == Catch::Approx(G(j, 50 + j)).margin(1e-12));
}

TEST_CASE("cosine features approximate the RBF kernel", "[features]") {
  const std::size_t l = 8;
  const auto map = build_feature_map(l, 10000, DegreeSpec::regular(l, l),
                                     WeightLaw::gaussian_iso(1.0, BiasLaw::phase()), Nonlinearity::cosine(), 31);
  const Matrix A = uniform_points(100, l, -1, 1, 1), B = uniform_points(100, l, -1, 1, 2);
  const auto est = kernel_estimates(map, A, B);
  for (Eigen::Index j = 0; j < 100; ++j)
    CHECK(std::abs(est[j] - rbf_direct(A.row(j).transpose(), B.row(j).transpose(), 1.0)) < 0.05);
}

TEST_CASE("d=1 stump sign features approximate the l1 kernel", "[features]") {
  // Rademacher weights, bias U[-2, 2]: c = 2 E|w| / (a2 - a1) = 1/2.
  const std::size_t l = 4;
  const auto map = build_feature_map(l, 100000, DegreeSpec::regular(l, 1),
                                     WeightLaw::rademacher(1.0, BiasLaw::uniform(-2, 2)), Nonlinearity::sign(), 5);
  const Matrix X = uniform_points(20, l, -0.5, 0.5, 8);
  const Matrix G = empirical_kernel(map, X);
  for (Eigen::Index i = 0; i < 20; ++i)
    for (Eigen::Index j = 0; j < 20; ++j) {
      const double exact = 1.0 - 0.5 / l * (X.row(i) - X.row(j)).lpNorm<1>();
      CHECK(std::abs(G(i, j) - exact) < 0.02);
    }
}

TEST_CASE("d=1 gaussian stump constant uses the half-normal mean", "[features]") {
  const double sigma = 0.8;
  const std::size_t l = 3;
  const auto map = build_feature_map(l, 100000, DegreeSpec::regular(l, 1),
                                     WeightLaw::gaussian_iso(sigma, BiasLaw::uniform(-4, 4)), Nonlinearity::sign(), 15);
  const double c = 2 * sigma * std::sqrt(2 / std::numbers::pi) / 8.0;
  const Matrix A = uniform_points(30, l, -0.5, 0.5, 1), B = uniform_points(30, l, -0.5, 0.5, 2);
  const auto est = kernel_estimates(map, A, B);
  // Gaussian weights exceed the bias interval with small probability; the residual is well inside 0.02.
  for (Eigen::Index j = 0; j < 30; ++j)
    CHECK(std::abs(est[j] - (1 - c / l * (A.row(j) - B.row(j)).lpNorm<1>())) < 0.02);
}
