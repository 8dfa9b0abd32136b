#include <cstring>
#include <stdexcept>

#include "doctest.h"
#include "nestlie/subspace.hpp"
#include "test_helpers.hpp"

using namespace nestlie;
using nestlie::testing::random_matrix;
using nestlie::testing::random_member;

namespace {

Matrix unit(int n, int i, int j) { return matrix_unit(n, i, j); }

}  // namespace

TEST_CASE("vectorization round trip") {
  SplitMix64 rng(5);
  const Matrix t = random_matrix(3, rng);
  CHECK((unvectorize(vectorize(t), 3) - t).norm() == 0.0);
  // Trace inner product equals the standard one on vectorized images.
  const Matrix s = random_matrix(3, rng);
  const Complex lhs = (s.adjoint() * t).trace();
  const Complex rhs = vectorize(s).dot(vectorize(t));
  CHECK(std::abs(lhs - rhs) <= 1e-12);
}

TEST_CASE("span basics") {
  const auto s = span_of({unit(2, 0, 0), unit(2, 0, 1)});
  CHECK(s.matrix_dim() == 2);
  CHECK(s.dim() == 2);
  // Orthonormal within round-off.
  const Eigen::MatrixXcd gram = s.basis().adjoint() * s.basis();
  CHECK((gram - Eigen::MatrixXcd::Identity(2, 2)).norm() <= 1e-10);

  // Dependent generators collapse.
  const auto dep = span_of({unit(2, 0, 0), unit(2, 0, 0) * 2.0});
  CHECK(dep.dim() == 1);

  // A 1e-15 perturbation of a repeated generator is below the default
  // relative rank rule.
  Matrix wiggle = unit(2, 0, 0);
  wiggle(1, 1) = Complex(1e-15, 0.0);
  CHECK(span_of({unit(2, 0, 0), wiggle}).dim() == 1);
  // But survives when it is the only direction.
  CHECK(span_of({Matrix::Zero(2, 2), wiggle - unit(2, 0, 0)}).dim() == 1);

  // Explicit absolute tolerance removes small directions.
  CHECK(span_of({unit(2, 0, 0), wiggle}, 1e-6).dim() == 1);
  Matrix small = unit(2, 1, 1) * 1e-8;
  CHECK(span_of({unit(2, 0, 0), small}, 1e-6).dim() == 1);
  CHECK(span_of({unit(2, 0, 0), small}, 0.0).dim() == 2);

  CHECK(span_of({}, 3, 0.0).dim() == 0);
  CHECK(OperatorSubspace::zero(3).dim() == 0);
  CHECK(OperatorSubspace::full(3).dim() == 9);
  CHECK_THROWS_AS(span_of({}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(span_of({unit(2, 0, 0)}, -1.0), std::invalid_argument);
}

TEST_CASE("span is deterministic bit for bit") {
  SplitMix64 rng(7);
  std::vector<Matrix> gens;
  for (int i = 0; i < 40; ++i) gens.push_back(random_matrix(4, rng));
  const auto a = span_of(gens, 0.0);
  const auto b = span_of(gens, 0.0);
  REQUIRE(a.dim() == b.dim());
  CHECK(std::memcmp(a.basis().data(), b.basis().data(),
                    sizeof(Complex) * std::size_t(a.basis().size())) == 0);
}

TEST_CASE("streaming span matches one-shot rank on long generator lists") {
  // More generators than the internal chunk size, with known rank.
  SplitMix64 rng(9);
  std::vector<Matrix> pool;
  for (int i = 0; i < 5; ++i) pool.push_back(random_matrix(3, rng));
  std::vector<Matrix> gens;
  for (int i = 0; i < 600; ++i) {
    Matrix mix = Matrix::Zero(3, 3);
    for (const auto& p : pool) {
      const double re = rng.normal();
      const double im = rng.normal();
      mix += Complex(re, im) * p;
    }
    gens.push_back(mix);
  }
  CHECK(span_of(gens, 0.0).dim() == 5);
}

TEST_CASE("membership scales with the operator norm") {
  const auto s = span_of({unit(3, 0, 1)});
  CHECK(contains(s, unit(3, 0, 1)));
  CHECK(contains(s, unit(3, 0, 1) * Complex(0.0, 3.0)));
  CHECK(contains(s, Matrix::Zero(3, 3)));
  CHECK(!contains(s, unit(3, 1, 0)));
  // Relative threshold: a large member plus a relatively tiny defect passes,
  // the same defect on a unit-scale member fails.
  Matrix big = unit(3, 0, 1) * 1e6;
  big(2, 2) = Complex(1e-4, 0.0);  // 1e-10 relative
  CHECK(contains(s, big));
  Matrix small = unit(3, 0, 1);
  small(2, 2) = Complex(1e-4, 0.0);
  CHECK(!contains(s, small));
}

TEST_CASE("includes and equal are basis independent") {
  SplitMix64 rng(13);
  const Matrix a = random_matrix(3, rng);
  const Matrix b = random_matrix(3, rng);
  const auto s1 = span_of({a, b});
  const auto s2 = span_of({a + b, a - Complex(0, 1) * b, b * 2.0});
  CHECK(s1.dim() == 2);
  CHECK(s2.dim() == 2);
  CHECK(includes(s1, s2));
  CHECK(equal(s1, s2));
  const auto line = span_of({a});
  CHECK(includes(s1, line));
  CHECK(!includes(line, s1));
  CHECK(!equal(line, s1));
  CHECK(includes(line, OperatorSubspace::zero(3)));
  CHECK_THROWS_AS(includes(line, OperatorSubspace::zero(4)), std::invalid_argument);
}

TEST_CASE("sum and intersection") {
  const auto e11 = span_of({unit(2, 0, 0)});
  const auto e22 = span_of({unit(2, 1, 1)});
  const auto both = sum(e11, e22);
  CHECK(both.dim() == 2);
  CHECK(contains(both, unit(2, 0, 0) + unit(2, 1, 1) * Complex(0, 2)));
  CHECK(intersect(e11, e22).dim() == 0);

  const auto diag = span_of({unit(2, 0, 0) + unit(2, 1, 1)});
  const auto upper = span_of({unit(2, 0, 0), unit(2, 0, 1), unit(2, 1, 1)});
  const auto meet = intersect(diag, upper);
  CHECK(meet.dim() == 1);
  CHECK(contains(meet, unit(2, 0, 0) + unit(2, 1, 1)));

  // Sum with zero and intersection with the full space are identities.
  CHECK(equal(sum(diag, OperatorSubspace::zero(2)), diag));
  CHECK(equal(intersect(diag, OperatorSubspace::full(2)), diag));
}

TEST_CASE("Grassmann dimension identity on random subspaces") {
  SplitMix64 rng(19);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + int(rng.below(3));
    std::vector<Matrix> ga, gb, shared;
    const int ns = int(rng.below(3));
    for (int i = 0; i < ns; ++i) shared.push_back(random_matrix(n, rng));
    std::vector<Matrix> a_gens = shared, b_gens = shared;
    const int na = 1 + int(rng.below(3));
    const int nb = 1 + int(rng.below(3));
    for (int i = 0; i < na; ++i) a_gens.push_back(random_matrix(n, rng));
    for (int i = 0; i < nb; ++i) b_gens.push_back(random_matrix(n, rng));
    const auto a = span_of(a_gens, n, 0.0);
    const auto b = span_of(b_gens, n, 0.0);
    const auto s = sum(a, b);
    const auto i = intersect(a, b);
    CHECK(s.dim() + i.dim() == a.dim() + b.dim());
    CHECK(includes(a, i));
    CHECK(includes(b, i));
    CHECK(includes(s, a));
    CHECK(includes(s, b));
  }
}

TEST_CASE("close_under reaches the bracket closure of a nilpotent seed") {
  // Seed E21 in 2x2, maps = brackets with the upper triangular units:
  // closure is the traceless algebra span{E21, E11 - E22, E12}.
  const int n = 2;
  std::vector<MatrixMap> maps;
  for (const auto& [u, v] : {std::pair{0, 0}, {0, 1}, {1, 1}}) {
    const Matrix g = unit(n, u, v);
    maps.push_back([g](const Matrix& t) { return t * g - g * t; });
  }
  const auto closure = close_under(span_of({unit(n, 1, 0)}), maps);
  CHECK(closure.dim() == 3);
  CHECK(contains(closure, unit(n, 1, 0)));
  CHECK(contains(closure, unit(n, 0, 1)));
  CHECK(contains(closure, unit(n, 0, 0) - unit(n, 1, 1)));
  CHECK(!contains(closure, unit(n, 0, 0)));
  CHECK(!contains(closure, Matrix::Identity(n, n)));

  // Idempotent.
  const auto again = close_under(closure, maps);
  CHECK(again.dim() == 3);
  CHECK(equal(again, closure));
}

TEST_CASE("close_under is monotone in the seed") {
  SplitMix64 rng(29);
  const int n = 3;
  std::vector<MatrixMap> maps;
  for (int u = 0; u < n; ++u)
    for (int v = u; v < n; ++v) {
      const Matrix g = unit(n, u, v);
      maps.push_back([g](const Matrix& t) { return t * g - g * t; });
    }
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = random_matrix(n, rng);
    const Matrix b = random_matrix(n, rng);
    const auto small = close_under(span_of({a}, n, 0.0), maps);
    const auto large = close_under(span_of({a, b}, n, 0.0), maps);
    CHECK(includes(large, small));
  }
}

TEST_CASE("close_under with no maps or empty seed") {
  const auto seed = span_of({unit(2, 0, 0)});
  CHECK(equal(close_under(seed, {}), seed));
  const auto nothing = close_under(OperatorSubspace::zero(2), {});
  CHECK(nothing.dim() == 0);
}

TEST_CASE("from_units builds exact patterns") {
  const auto s = OperatorSubspace::from_units(2, {{0, 0}, {0, 1}});
  CHECK(s.dim() == 2);
  CHECK(contains(s, unit(2, 0, 0)));
  CHECK(contains(s, unit(2, 0, 1)));
  CHECK(!contains(s, unit(2, 1, 1)));
  CHECK_THROWS_AS(OperatorSubspace::from_units(2, {{0, 0}, {0, 0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(OperatorSubspace::from_units(2, {{2, 0}}), std::out_of_range);
}

TEST_CASE("random members stay inside their span") {
  SplitMix64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + int(rng.below(4));
    std::vector<Matrix> gens;
    const int k = 1 + int(rng.below(4));
    for (int i = 0; i < k; ++i) gens.push_back(random_matrix(n, rng));
    const auto s = span_of(gens, n, 0.0);
    CHECK(contains(s, random_member(s, rng)));
  }
}
