#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "piforge/dimexpr.hpp"
#include "piforge/pigroups.hpp"

using namespace piforge;

namespace {

const DimSystem& mlt() {
  static const DimSystem s({"M", "L", "T"});
  return s;
}

std::vector<DimVector> dims(std::initializer_list<const char*> exprs) {
  std::vector<DimVector> out;
  for (auto e : exprs) out.push_back(parse_dimension(e, mlt()));
  return out;
}

RVector q(std::initializer_list<Rational> xs) { return RVector(xs); }

std::vector<DimVector> random_dims(std::mt19937_64& rng, const DimSystem& sys, std::size_t n, int lo, int hi) {
  std::uniform_int_distribution<int> e(lo, hi);
  std::vector<DimVector> out;
  for (std::size_t i = 0; i < n; ++i) {
    RVector v;
    for (std::size_t j = 0; j < sys.size(); ++j) v.emplace_back(e(rng));
    out.emplace_back(sys, v);
  }
  return out;
}

}  // namespace

TEST(PiBasis, MassSpring) {
  const auto b = pi_basis(dims({"M", "M*T^-2", "T"}));
  ASSERT_EQ(b.r(), 1u);
  EXPECT_EQ(b.groups[0].coefficients(), q({-1, 1, 2}));
}

TEST(PiBasis, LengthTimeVelocity) {
  const auto b = pi_basis(dims({"L", "T", "L/T"}));
  ASSERT_EQ(b.r(), 1u);
  EXPECT_EQ(b.groups[0].coefficients(), q({-1, 1, 1}));
}

TEST(PiBasis, IndependentDimsGiveEmptyBasis) {
  const auto b = pi_basis(dims({"M", "L", "T"}));
  EXPECT_EQ(b.r(), 0u);
  EXPECT_TRUE(is_pi_basis(b));
}

TEST(PiBasis, EmptyInputThrows) { EXPECT_THROW(pi_basis(std::vector<DimVector>{}), Error); }

TEST(SpecialBasis, MassSpring) {
  const auto sb = special_basis(dims({"M", "M*T^-2", "T"}));
  EXPECT_EQ(sb.pivot_indices, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(sb.free_indices, (std::vector<std::size_t>{2}));
  ASSERT_EQ(sb.base.r(), 1u);
  EXPECT_EQ(sb.base.groups[0].coefficients(), q({Rational(-1, 2), Rational(1, 2), 1}));
  EXPECT_TRUE(dim_combine(sb.base.groups[0], sb.base.dims).is_zero());
}

TEST(SpecialBasis, LengthTimeVelocity) {
  const auto sb = special_basis(dims({"L", "T", "L/T"}));
  EXPECT_EQ(sb.free_indices, (std::vector<std::size_t>{2}));
  EXPECT_EQ(sb.base.groups[0].coefficients(), q({-1, 1, 1}));
}

TEST(SpecialBasis, NoGroups) {
  const auto sb = special_basis(dims({"M", "L"}));
  EXPECT_EQ(sb.base.r(), 0u);
  EXPECT_TRUE(sb.free_indices.empty());
}

TEST(Transition, Examples) {
  const auto d = dims({"M", "M*T^-2", "T"});
  const auto canon = pi_basis(d);
  const auto t_id = transition(canon, canon);
  EXPECT_EQ(t_id.matrix, QMatrix::identity(1));

  const auto sb = special_basis(d);
  const auto t = transition(canon, sb.base);
  EXPECT_EQ(t.matrix, (QMatrix{{Rational(1, 2)}}));
  EXPECT_EQ(t.inverse, (QMatrix{{2}}));

  // Swapping the two groups of a two-group basis gives a permutation matrix.
  const auto d2 = dims({"L", "T", "L/T", "L^2"});
  const auto b2 = pi_basis(d2);
  ASSERT_EQ(b2.r(), 2u);
  PiBasis swapped{b2.dims, {b2.groups[1], b2.groups[0]}};
  EXPECT_EQ(transition(b2, swapped).matrix, (QMatrix{{0, 1}, {1, 0}}));
}

TEST(Transition, RejectsNonBases) {
  const auto d = dims({"M", "M*T^-2", "T"});
  PiBasis bogus{d, {Fclcf(q({1, 0, 0}))}};
  EXPECT_THROW(transition(pi_basis(d), bogus), Error);
  PiBasis other = pi_basis(dims({"L", "T", "L/T"}));
  EXPECT_THROW(transition(pi_basis(d), other), Error);
}

TEST(IsPiBasis, Examples) {
  const auto d = dims({"M", "M*T^-2", "T"});
  EXPECT_TRUE(is_pi_basis(pi_basis(d)));
  EXPECT_TRUE(is_pi_basis(std::vector<Fclcf>{Fclcf(q({-2, 2, 4}))}, d));
  EXPECT_FALSE(is_pi_basis(std::vector<Fclcf>{Fclcf(q({1, 0, 0}))}, d));
  EXPECT_FALSE(is_pi_basis(std::vector<Fclcf>{Fclcf(q({-1, 1, 2})), Fclcf(q({-2, 2, 4}))}, d));
  EXPECT_FALSE(is_pi_basis(std::vector<Fclcf>{Fclcf(q({-1, 1}))}, d));
}

TEST(PiGroupsProperties, CountIsNMinusRank) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t d = 1 + rng() % 4, n = 1 + rng() % 8;
    std::vector<std::string> names;
    for (std::size_t j = 0; j < d; ++j) names.push_back("D" + std::to_string(j));
    const DimSystem sys(names);
    const auto ws = random_dims(rng, sys, n, -3, 3);
    oracle::IntMatrix a(d, std::vector<long long>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) a[j][i] = numerator(ws[i][j]).convert_to<long long>();
    const auto b = pi_basis(ws);
    EXPECT_EQ(b.r(), n - oracle::rank_by_minors(a));
    for (const auto& g : b.groups) EXPECT_TRUE(dim_combine(g, ws).is_zero());

    const auto sb = special_basis(ws);
    EXPECT_TRUE(is_pi_basis(sb.base));
    std::vector<bool> seen(n, false);
    for (auto i : sb.pivot_indices) seen[i] = true;
    for (auto i : sb.free_indices) {
      EXPECT_FALSE(seen[i]);
      seen[i] = true;
    }
    for (bool s : seen) EXPECT_TRUE(s);
    for (std::size_t i = 0; i < sb.base.r(); ++i)
      for (std::size_t k = 0; k < sb.free_indices.size(); ++k)
        EXPECT_EQ(sb.base.groups[i][sb.free_indices[k]], i == k ? 1 : 0);
  }
}

TEST(PiGroupsProperties, TransitionsComposeAndInvert) {
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<int> e(-2, 2);
  const DimSystem sys({"M", "L", "T"});
  int cases = 0;
  while (cases < 150) {
    const auto ws = random_dims(rng, sys, 3 + rng() % 4, -2, 2);
    const auto a = pi_basis(ws);
    const std::size_t r = a.r();
    if (r == 0) continue;
    auto random_invertible = [&] {
      for (;;) {
        QMatrix m(r, r);
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < r; ++j) m(i, j) = e(rng);
        if (invert(m)) return m;
      }
    };
    const QMatrix m1 = random_invertible(), m2 = random_invertible();
    const PiBasis b = change_basis(a, m1);
    const PiBasis c = change_basis(b, m2);
    ASSERT_TRUE(is_pi_basis(b));
    ASSERT_TRUE(is_pi_basis(c));
    const auto tab = transition(a, b), tbc = transition(b, c), tac = transition(a, c);
    EXPECT_EQ(tab.matrix, m1);
    EXPECT_EQ(tab.matrix * tab.inverse, QMatrix::identity(r));
    EXPECT_EQ(tac.matrix, tbc.matrix * tab.matrix);
    // Applying the matrix to the source coefficient rows reproduces the target.
    EXPECT_EQ(tab.matrix * a.coefficient_matrix(), b.coefficient_matrix());
    ++cases;
  }
}
