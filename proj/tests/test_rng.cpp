#include <catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <vector>

#include "sparsekern/parallel.hpp"
#include "sparsekern/rng.hpp"

using namespace sparsekern;

TEST_CASE("philox known-answer vectors", "[rng]") {
  using C = Philox4x32::counter_type;
  using K = Philox4x32::key_type;
  CHECK(Philox4x32::apply(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox4x32::apply(C{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, K{0xffffffffu, 0xffffffffu}) ==
        C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(Philox4x32::apply(C{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, K{0xa4093822u, 0x299f31d0u}) ==
        C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are reproducible and distinct", "[rng]") {
  Stream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  std::vector<std::uint64_t> va, vb, vc, vd;
  for (int i = 0; i < 64; ++i) {
    va.push_back(a());
    vb.push_back(b());
    vc.push_back(c());
    vd.push_back(d());
  }
  CHECK(va == vb);
  CHECK(va != vc);
  CHECK(va != vd);
}

TEST_CASE("derive_seed separates tag paths", "[rng]") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 4; ++s)
    for (std::uint64_t t = 0; t < 16; ++t) {
      seen.insert(derive_seed(s, {t}));
      seen.insert(derive_seed(s, {t, 1}));
    }
  CHECK(seen.size() == 4u * 16u * 2u);
  CHECK(derive_seed(5, {1, 2}) == derive_seed(5, {1, 2}));
  CHECK(derive_seed(5, {1, 2}) != derive_seed(5, {2, 1}));
}

TEST_CASE("uniform and normal moments", "[rng]") {
  Stream rng(1, 0);
  const int n = 200000;
  double su = 0, su2 = 0, sn = 0, sn2 = 0, sn4 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    su += u;
    su2 += u * u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
    sn4 += z * z * z * z;
  }
  CHECK(std::abs(su / n - 0.5) < 5 * std::sqrt(1.0 / 12 / n));
  CHECK(std::abs(su2 / n - 1.0 / 3) < 0.005);
  CHECK(std::abs(sn / n) < 5 / std::sqrt(double(n)));
  CHECK(std::abs(sn2 / n - 1.0) < 5 * std::sqrt(2.0 / n));
  CHECK(std::abs(sn4 / n - 3.0) < 0.1);
}

TEST_CASE("below is uniform over small ranges", "[rng]") {
  Stream rng(9, 3);
  const int n = 70000;
  std::vector<int> counts(7, 0);
  for (int i = 0; i < n; ++i) {
    const auto v = rng.below(7);
    REQUIRE(v < 7u);
    ++counts[v];
  }
  const double p = 1.0 / 7, sd = std::sqrt(n * p * (1 - p));
  for (int c : counts) CHECK(std::abs(c - n * p) < 4 * sd);
  CHECK(rng.below(1) == 0u);
}

TEST_CASE("parallel_for fills every slot once regardless of thread count", "[rng]") {
  for (unsigned threads : {1u, 3u, 8u}) {
    set_thread_count(threads);
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) REQUIRE(h == 1);
  }
  set_thread_count(0);
}

TEST_CASE("parallel_for propagates exceptions", "[rng]") {
  set_thread_count(4);
  CHECK_THROWS_AS(parallel_for(100, [](std::size_t i) {
                    if (i == 57) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
  set_thread_count(0);
}
