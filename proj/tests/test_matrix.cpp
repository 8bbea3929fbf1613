#include <catch2/catch_amalgamated.hpp>

#include "silver/matrix.hpp"
#include "silver/numeric.hpp"

using namespace silver;

TEST_CASE("l2_normalize_rows scales a 3-4-5 row to unit norm") {
  Matrix m{{3.0, 4.0}};
  Matrix n = l2_normalize_rows(m);
  REQUIRE(n(0, 0) == Catch::Approx(0.6).epsilon(1e-12));
  REQUIRE(n(0, 1) == Catch::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("l2_normalize_rows leaves unit rows unchanged") {
  Matrix m{{1.0, 0.0}, {0.0, 1.0}};
  REQUIRE(l2_normalize_rows(m) == m);
}

TEST_CASE("l2_normalize_rows rejects near-zero rows") {
  Matrix m{{0.0, 0.0}};
  REQUIRE_THROWS_AS(l2_normalize_rows(m), ZeroRowError);
  Matrix tiny{{1e-13, 0.0}};
  REQUIRE_THROWS_AS(l2_normalize_rows(tiny), ZeroRowError);
}

TEST_CASE("l2_normalize_rows preserves row direction") {
  Matrix m{{-3.0, 0.0, 4.0}};
  Matrix n = l2_normalize_rows(m);
  REQUIRE(n(0, 0) < 0.0);
  REQUIRE(n(0, 2) > 0.0);
  REQUIRE(dot(n.row(0), n.row(0)) == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("matrix transpose and row permutation") {
  Matrix m{{1.0, 2.0, 3.0}, {4.0, 5.0, 6.0}};
  Matrix t = m.transposed();
  REQUIRE(t.rows() == 3);
  REQUIRE(t(2, 1) == 6.0);
  std::vector<std::size_t> order{1, 0};
  Matrix p = m.permuted_rows(order);
  REQUIRE(p(0, 0) == 4.0);
  REQUIRE(p(1, 2) == 3.0);
}

TEST_CASE("stable_sum is identical for any permutation of the addends") {
  std::vector<double> v{0.1, -7.3, 1e-9, 2.5, 3.7e4, -0.0, 0.0, 1.0 / 3.0};
  const double base = stable_sum(v);
  std::sort(v.begin(), v.end());
  do {
    REQUIRE(stable_sum(v) == base);
  } while (std::next_permutation(v.begin(), v.end()));
}

TEST_CASE("matrix rejects ragged initializer") {
  REQUIRE_THROWS_AS(Matrix({{1.0, 2.0}, {3.0}}), DimMismatchError);
}
