#include <gtest/gtest.h>

#include "flatcheck/errors.hpp"
#include "flatcheck/prolong/prolonged.hpp"
#include "support.hpp"

using namespace flatcheck;

namespace {

VectorField signed_coord(VarRef v, int k) {
  VectorField c = VectorField::coord(v);
  return k % 2 ? -c : c;
}

MultiIndex constant_index(int m, int c) { return MultiIndex(std::vector<int>(size_t(m), c)); }

struct Case {
  SystemDef sys;
  MultiIndex j;
};

Case random_case(test::Gen& gen) {
  int n = gen.uniform(1, 4), m = gen.uniform(1, std::min(n, 3));
  return {gen.system(n, m), gen.index(m, 3)};
}

}  // namespace

TEST(Prolonged, VectorFieldsOfChainedAtFourZero) {
  SystemDef s = load_system(test::fixture("chained.flt"));
  ProlongedSystem ps(s, MultiIndex({4, 0}));
  EXPECT_EQ(ps.space().dim(), 12);
  EXPECT_EQ(ps.g0().component(VarRef::input(0, 3)), Expr::var(VarRef::input(0, 4)));
  EXPECT_TRUE(ps.g0().component(VarRef::input(1, 0)).is_zero());
  RankEngine eng;
  std::vector<int> ranks;
  for (int k = 0; k <= 7; ++k) ranks.push_back(eng.rank(ps.G(k), ps.space()));
  EXPECT_EQ(ranks, (std::vector<int>{2, 4, 6, 8, 9, 10, 11, 12}));
  for (int k = 0; k <= 7; ++k) EXPECT_TRUE(eng.is_involutive(ps.G(k), ps.space())) << k;
}

// ad^k d/du_i^(j_i) = (-1)^k d/du_i^(j_i - k) for k <= j_i.
TEST(ProlongedIdentities, CoordinateFields) {
  test::Gen gen(41);
  for (int t = 0; t < 200; ++t) {
    Case c = random_case(gen);
    ProlongedSystem ps(c.sys, c.j);
    for (int i = 0; i < c.sys.m(); ++i)
      for (int k = 0; k <= c.j[i]; ++k)
        EXPECT_EQ(ps.ad_g(i, k), signed_coord(VarRef::input(i, c.j[i] - k), k)) << "case " << t;
  }
}

// ad^(j_i + k) g_i = (-1)^(j_i) ad^k d/du_i^(0), vertical with dependence bound j min (k - 1).
TEST(ProlongedIdentities, VerticalBrackets) {
  test::Gen gen(42);
  for (int t = 0; t < 200; ++t) {
    Case c = random_case(gen);
    ProlongedSystem ps(c.sys, c.j);
    for (int i = 0; i < c.sys.m(); ++i)
      for (int k = 1; k <= 3; ++k) {
        VectorField lhs = ps.ad_g(i, c.j[i] + k);
        VectorField rhs = ps.ad_u0(i, k);
        if (c.j[i] % 2) rhs = -rhs;
        EXPECT_EQ(lhs, rhs) << "case " << t;
        EXPECT_TRUE(is_vertical(lhs, cmin(c.j, constant_index(c.sys.m(), k - 1)))) << "case " << t;
      }
  }
}

// [d/du_p^(j_p - k), ad^(l - j_q) d/du_q^(0)] = 0 for k < j_p, l >= j_q, k + l < j_p + j_q + 1.
TEST(ProlongedIdentities, VanishingBrackets) {
  test::Gen gen(43);
  int checked = 0;
  for (int t = 0; t < 200; ++t) {
    Case c = random_case(gen);
    ProlongedSystem ps(c.sys, c.j);
    int m = c.sys.m();
    for (int p = 0; p < m; ++p)
      for (int q = 0; q < m; ++q)
        for (int k = 0; k < c.j[p]; ++k)
          for (int r = 0; k + r + c.j[q] < c.j[p] + c.j[q] + 1; ++r) {
            VectorField b = lie_bracket(VectorField::coord(VarRef::input(p, c.j[p] - k)), ps.ad_u0(q, r));
            EXPECT_TRUE(b.is_zero()) << "case " << t;
            ++checked;
          }
  }
  EXPECT_GT(checked, 200);
}

TEST(GammaSequence, MatchesBrackets) {
  test::Gen gen(44);
  for (int t = 0; t < 200; ++t) {
    Case c = random_case(gen);
    ProlongedSystem ps(c.sys, c.j);
    int i = gen.uniform(0, c.sys.m() - 1);
    for (int k = 1; k <= 3; ++k) EXPECT_EQ(gamma_field(ps, i, k), ps.ad_g(i, c.j[i] + k)) << "case " << t;
  }
}

TEST(Decomposition, DirectSumAtEveryLevel) {
  test::Gen gen(45);
  RankEngine eng;
  for (int t = 0; t < 200; ++t) {
    Case c = random_case(gen);
    ProlongedSystem ps(c.sys, c.j);
    int top = c.sys.n() + int(c.j.total());
    int prev_g = -1, prev_d = -1;
    for (int k = 0; k <= top; ++k) {
      DecompositionResult r = decomposition_check(ps, k, eng);
      EXPECT_TRUE(r.ok) << "case " << t << " k " << k;
      EXPECT_GE(r.rank_g, prev_g);
      EXPECT_GE(r.rank_delta, prev_d);
      prev_g = r.rank_g;
      prev_d = r.rank_delta;
    }
  }
}

TEST(Filtrations, StabilisationAndTail) {
  test::Gen gen(46);
  RankEngine eng;
  for (int t = 0; t < 200; ++t) {
    Case c = random_case(gen);
    ProlongedSystem ps(c.sys, c.j);
    const JetSpace& sp = ps.space();
    int bound = c.sys.n() + int(c.j.total());
    int k_star = -1, prev = -1;
    for (int k = 0; k <= bound + 1; ++k) {
      int r = eng.rank(ps.G(k), sp);
      if (r == prev) {
        k_star = k - 1;
        break;
      }
      prev = r;
    }
    ASSERT_GE(k_star, 0) << "case " << t;
    EXPECT_LE(k_star, bound);
    // Past k_star the pieces stay put: equal rank and mutual containment.
    for (int k = k_star + 1; k <= k_star + 2; ++k) {
      auto ds = eng.span(ps.Delta(k_star), sp);
      auto dk = eng.span(ps.Delta(k), sp);
      EXPECT_EQ(ds.rank(), dk.rank()) << "case " << t;
      for (const auto& v : ps.Delta(k).gens) EXPECT_TRUE(ds.contains(v));
      for (const auto& v : ps.Delta(k_star).gens) EXPECT_TRUE(dk.contains(v));
      EXPECT_EQ(eng.rank(ps.Gamma(k), sp), eng.rank(ps.Gamma(k_star), sp));
    }
  }
}

TEST(Filtrations, GammaProperties) {
  test::Gen gen(47);
  RankEngine eng;
  for (int t = 0; t < 200; ++t) {
    Case c = random_case(gen);
    ProlongedSystem ps(c.sys, c.j);
    for (int k = 0; k <= 3; ++k) {
      Distribution g = ps.Gamma(k);
      EXPECT_TRUE(eng.is_involutive(g, ps.space()));
      for (int l = 0; l <= 3; ++l)
        for (const auto& a : g.gens)
          for (const auto& b : ps.Delta(l).gens)
            for (const auto& [v, e] : lie_bracket(a, b).components())
              EXPECT_FALSE(v.kind == VarKind::Input && v.order >= 1) << "case " << t;
    }
  }
}

// Involutive but rank deficient at j = 0: every prolongation keeps the same codimension.
TEST(Filtrations, StrongControllabilityIsNotGained) {
  SystemDef s = load_system(test::fixture("uncontrollable.flt"));
  RankEngine eng;
  ProlongedSystem p0(s, MultiIndex::zeros(s.m()));
  int r0 = eng.rank(p0.G(s.n() + 1), p0.space());
  int codim0 = p0.space().dim() - r0;
  ASSERT_GT(codim0, 0);
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; b <= 3; ++b) {
      ProlongedSystem ps(s, MultiIndex({a, b}));
      int top = s.n() + a + b + 1;
      for (int k = 0; k <= top; ++k) EXPECT_TRUE(eng.is_involutive(ps.G(k), ps.space()));
      EXPECT_EQ(ps.space().dim() - eng.rank(ps.G(top), ps.space()), codim0) << a << "," << b;
    }
}

TEST(BracketComparison, LinearSystemDifferenceVanishes) {
  SystemDef s = parse_system("system lin\nstate x1 x2 x3\ninput u v\ndot x1 = x2 + 2*u\ndot x2 = x3 - v\ndot x3 = u\n");
  RankEngine eng;
  for (int a = 0; a <= 2; ++a)
    for (int nu = 1; nu <= 3; ++nu) {
      MultiIndex j({a, 1});
      BracketComparison r = bracket_comparison_check(s, j, 0, nu, eng);
      EXPECT_TRUE(r.identity_ok);
      EXPECT_TRUE(r.membership_ok);
      ProlongedSystem pj(s, j), p0(s, MultiIndex::zeros(2));
      VectorField rhs = p0.ad_g(0, nu);
      if (a % 2) rhs = -rhs;
      EXPECT_TRUE((pj.ad_g(0, a + nu) - rhs).is_zero());
    }
}

TEST(BracketComparison, InvolutiveUncontrollableFixture) {
  SystemDef s = load_system(test::fixture("uncontrollable.flt"));
  RankEngine eng;
  for (int nu = 1; nu <= 3; ++nu)
    for (int i = 0; i < 2; ++i) {
      BracketComparison r = bracket_comparison_check(s, MultiIndex({2, 1}), i, nu, eng);
      EXPECT_TRUE(r.identity_ok);
      EXPECT_TRUE(r.membership_ok) << "nu " << nu << " i " << i;
    }
}

TEST(BracketComparison, RequiresInvolutiveFiltration) {
  SystemDef s = load_system(test::fixture("chained.flt"));
  RankEngine eng;
  try {
    bracket_comparison_check(s, MultiIndex({1, 0}), 0, 1, eng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PreconditionNotMet);
  }
}
