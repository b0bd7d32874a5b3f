#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "piforge/exactlin.hpp"

using namespace piforge;

namespace {

QMatrix to_q(const oracle::IntMatrix& m, std::size_t cols) {
  QMatrix q(m.size(), cols);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) q(i, j) = Rational(m[i][j]);
  return q;
}

RVector ints(std::initializer_list<long long> xs) {
  RVector v;
  for (auto x : xs) v.emplace_back(x);
  return v;
}

}  // namespace

TEST(Rational, NormalizedForm) {
  Rational q = make_rational(6, -4);
  EXPECT_EQ(numerator(q), -3);
  EXPECT_EQ(denominator(q), 2);
  EXPECT_EQ(to_string(Rational(0)), "0");
  EXPECT_EQ(parse_rational("-1/2"), Rational(-1, 2));
  EXPECT_EQ(parse_rational("4/2"), Rational(2));
  EXPECT_THROW(parse_rational("1/0"), Error);
  EXPECT_THROW(parse_rational("x"), Error);
}

TEST(Rref, Identity) {
  auto r = rref(QMatrix::identity(2));
  EXPECT_EQ(r.reduced, QMatrix::identity(2));
  EXPECT_EQ(r.pivot_cols, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(r.rank, 2u);
}

TEST(Rref, TwoIndependentRows) {
  auto r = rref(QMatrix{{1, 1, 0}, {0, -2, 1}});
  EXPECT_EQ(r.rank, 2u);
  EXPECT_EQ(r.pivot_cols, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(r.reduced, (QMatrix{{1, 0, Rational(1, 2)}, {0, 1, Rational(-1, 2)}}));
}

TEST(Rref, Zero) {
  QMatrix z(3, 3);
  auto r = rref(z);
  EXPECT_EQ(r.reduced, z);
  EXPECT_TRUE(r.pivot_cols.empty());
  EXPECT_EQ(r.rank, 0u);
}

TEST(KernelBasis, MassSpringMatrix) {
  const oracle::IntMatrix m = {{1, 1, 0}, {0, -2, 1}};
  // Brute force: every small integer kernel vector is a multiple of (-1, 1, 2).
  auto brute = oracle::integer_kernel(m, 3, -3, 3);
  ASSERT_FALSE(brute.empty());
  for (const auto& v : brute) {
    EXPECT_EQ(v[1], -v[0]);
    EXPECT_EQ(v[2], -2 * v[0]);
  }
  auto k = kernel_basis(to_q(m, 3));
  ASSERT_EQ(k.size(), 1u);
  EXPECT_EQ(k[0], ints({-1, 1, 2}));
}

TEST(KernelBasis, IdentityHasTrivialKernel) { EXPECT_TRUE(kernel_basis(QMatrix::identity(4)).empty()); }

TEST(KernelBasis, ZeroRowGivesFullKernel) {
  auto k = kernel_basis(QMatrix(1, 3));
  ASSERT_EQ(k.size(), 3u);
  EXPECT_EQ(k[0], ints({1, 0, 0}));
  EXPECT_EQ(k[1], ints({0, 1, 0}));
  EXPECT_EQ(k[2], ints({0, 0, 1}));
}

TEST(KernelBasis, PrimitiveIntegerScaling) {
  // Kernel direction (2/3, -1/2, 1) -> (4, -3, 6).
  auto k = kernel_basis(QMatrix{{3, 0, -2}, {0, 2, 1}});
  ASSERT_EQ(k.size(), 1u);
  EXPECT_EQ(k[0], ints({4, -3, 6}));
}

TEST(Solve, Identity) {
  RVector b = ints({3, -1});
  auto x = solve(QMatrix::identity(2), b);
  ASSERT_TRUE(x);
  EXPECT_EQ(*x, b);
}

TEST(Solve, InconsistentRow) { EXPECT_FALSE(solve(QMatrix{{1, 1}, {0, 0}}, ints({1, 1}))); }

TEST(Solve, FreeVariablesZero) {
  auto x = solve(QMatrix{{1, 1, 0}, {0, -2, 1}}, ints({1, 0}));
  ASSERT_TRUE(x);
  EXPECT_EQ(*x, ints({1, 0, 0}));
}

TEST(Solve, WrongLengthThrows) { EXPECT_THROW(solve(QMatrix::identity(2), ints({1})), Error); }

TEST(Invert, Examples) {
  EXPECT_EQ(*invert(QMatrix::identity(3)), QMatrix::identity(3));
  auto inv = invert(QMatrix{{2, 0}, {0, Rational(1, 2)}});
  ASSERT_TRUE(inv);
  EXPECT_EQ(*inv, (QMatrix{{Rational(1, 2), 0}, {0, 2}}));
  EXPECT_FALSE(invert(QMatrix{{1, 1}, {1, 1}}));
  EXPECT_THROW(invert(QMatrix(2, 3)), Error);
}

TEST(ExactlinProperties, RankNullityAgainstMinorOracle) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> dr(1, 6), dc(1, 8);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t rows = dr(rng), cols = dc(rng);
    const auto im = oracle::random_int_matrix(rng, rows, cols, -3, 3);
    const QMatrix m = to_q(im, cols);
    const auto r = rref(m);
    const auto k = kernel_basis(m);
    EXPECT_EQ(r.rank, oracle::rank_by_minors(im));
    EXPECT_EQ(r.rank + k.size(), cols);
    for (const auto& v : k)
      for (const auto& e : m * v) EXPECT_EQ(e, 0);
    if (!k.empty()) {
      EXPECT_EQ(rank(QMatrix::from_rows(k, cols)), k.size());
    }
    for (std::size_t i = 1; i < r.pivot_cols.size(); ++i) EXPECT_LT(r.pivot_cols[i - 1], r.pivot_cols[i]);
  }
}

TEST(ExactlinProperties, InvertAndSolveRoundTrip) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> dn(1, 5);
  int singular = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = dn(rng);
    const auto im = oracle::random_int_matrix(rng, n, n, -3, 3);
    const QMatrix m = to_q(im, n);
    auto inv = invert(m);
    const bool full = oracle::det(im) != 0;
    EXPECT_EQ(inv.has_value(), full);
    if (inv) {
      EXPECT_EQ(*inv * m, QMatrix::identity(n));
      EXPECT_EQ(m * *inv, QMatrix::identity(n));
    } else {
      ++singular;
    }
    // A right-hand side built from a known x is always solvable and
    // reproduces b exactly.
    RVector x(n);
    for (auto& e : x) e = Rational(static_cast<long long>(rng() % 7) - 3, 1 + static_cast<long long>(rng() % 3));
    const RVector b = m * x;
    auto sol = solve(m, b);
    ASSERT_TRUE(sol);
    EXPECT_EQ(m * *sol, b);
  }
  EXPECT_GT(singular, 0);
}
