#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <sstream>

#include "sparsekern/csv.hpp"
#include "sparsekern/rng.hpp"

using namespace sparsekern;

TEST_CASE("doubles round-trip through their shortest text form", "[csv]") {
  Stream rng(11, 0);
  for (int i = 0; i < 20000; ++i) {
    const double v = std::ldexp(rng.normal(), static_cast<int>(rng.below(200)) - 100);
    REQUIRE(parse_double(format_double(v)) == v);
  }
  for (double v : {0.0, -0.0, 1.0, 0.1, 1e-310, std::numeric_limits<double>::max(),
                   std::numeric_limits<double>::denorm_min()})
    CHECK(parse_double(format_double(v)) == v);
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(3.0) == "3");
}

TEST_CASE("parse_double rejects garbage", "[csv]") {
  CHECK_THROWS_AS(parse_double("abc"), validation_error);
  CHECK_THROWS_AS(parse_double("1.0x"), validation_error);
  CHECK_THROWS_AS(parse_double(""), validation_error);
  CHECK(parse_double(" +2.5 ") == 2.5);
}

TEST_CASE("split_csv_line handles quotes and empty fields", "[csv]") {
  CHECK(split_csv_line("a,b,c") == std::vector<std::string>{"a", "b", "c"});
  CHECK(split_csv_line("\"x,y\",z") == std::vector<std::string>{"x,y", "z"});
  CHECK(split_csv_line("a,,b\r") == std::vector<std::string>{"a", "", "b"});
}

TEST_CASE("table writes header then typed rows", "[csv]") {
  Table t({"d", "name", "value"});
  t.add_row({std::int64_t{3}, std::string("rbf"), 0.25});
  t.add_row({std::int64_t{-1}, std::string("x"), 1e-20});
  CHECK(t.to_csv() == "d,name,value\n3,rbf,0.25\n-1,x,1e-20\n");
  CHECK_THROWS_AS(t.add_row({1.0}), validation_error);
}

TEST_CASE("numeric csv reading", "[csv]") {
  std::istringstream in("a,b\n1,2\n\n3.5,-4e2\n");
  const auto csv = read_numeric_csv(in);
  CHECK(csv.header == std::vector<std::string>{"a", "b"});
  REQUIRE(csv.values.rows() == 2);
  CHECK(csv.values(1, 0) == 3.5);
  CHECK(csv.values(1, 1) == -400.0);

  std::istringstream empty("");
  const auto e = read_numeric_csv(empty);
  CHECK(e.header.empty());
  CHECK(e.values.rows() == 0);

  std::istringstream header_only("a,b\n");
  CHECK(read_numeric_csv(header_only).values.rows() == 0);

  std::istringstream ragged("a,b\n1\n");
  CHECK_THROWS_AS(read_numeric_csv(ragged), validation_error);
  std::istringstream nan("a\nnan\n");
  CHECK_THROWS_AS(read_numeric_csv(nan), validation_error);
}
