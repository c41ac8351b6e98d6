#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace symcap;

namespace {

LatticePolytope poly(std::size_t n, std::vector<std::vector<long>> verts) {
  LatticePolytope p{n, {}};
  for (const auto& v : verts) {
    Point pt;
    for (long c : v) pt.emplace_back(c);
    p.vertices.push_back(pt);
  }
  return p;
}

BigRational factorial(unsigned long n) {
  BigRational f = 1;
  for (unsigned long i = 2; i <= n; ++i) f *= BigRational(i);
  return f;
}

}  // namespace

TEST(MomentPolytope, Examples) {
  EXPECT_TRUE(moment_polytope({1, 1, 2}).same_vertices(poly(3, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 2}})));
  EXPECT_TRUE(moment_polytope({1}).same_vertices(poly(1, {{0}, {1}})));
  EXPECT_TRUE(moment_polytope({2, 3}).same_vertices(poly(2, {{0, 0}, {2, 0}, {0, 3}})));
  EXPECT_THROW(moment_polytope({1, 0}), InvalidInput);
  EXPECT_EQ(moment_polytope({2, 3}).volume(), 3);
}

TEST(Subdivide, TwoByTwo) {
  Subdivision s = subdivide(2, 2);
  ASSERT_EQ(s.parts.size(), 2u);
  EXPECT_TRUE(s.parts[0].same_vertices(poly(2, {{1, 0}, {0, 0}, {0, 1}})));
  EXPECT_TRUE(s.parts[1].same_vertices(poly(2, {{1, 0}, {0, 1}, {0, 2}})));
  EXPECT_EQ(s.theta.linear, (IntMatrix{{1, 0}, {1, 1}}));
  EXPECT_EQ(s.theta.translation, (Point{0, -1}));
}

TEST(Subdivide, SmallCases) {
  Subdivision one = subdivide(1, 3);
  ASSERT_EQ(one.parts.size(), 1u);
  EXPECT_TRUE(one.parts[0].same_vertices(moment_polytope({1, 1, 1})));
  Subdivision three = subdivide(3, 3);
  ASSERT_EQ(three.parts.size(), 3u);
  BigRational total = 0;
  for (const auto& p : three.parts) {
    EXPECT_EQ(p.volume(), make_rational(1, 6));
    total += p.volume();
  }
  EXPECT_EQ(total, moment_polytope({1, 1, 3}).volume());
}

TEST(VerifyTiling, Examples) {
  EXPECT_TRUE(verify_tiling(subdivide(4, 3).as_decomposition(4)));
  Decomposition overlap{moment_polytope({1, 2}), {}};
  LatticePolytope d1 = slice(1, 2);
  overlap.parts.push_back(DecompositionPart{d1, 1});
  overlap.parts.push_back(DecompositionPart{d1, 1});
  TilingReport r = verify_tiling(overlap);
  EXPECT_FALSE(r.ok);
  EXPECT_NE(r.reason.find("overlap"), std::string::npos);
  EXPECT_TRUE(verify_tiling(fig2_decomposition(5, 2)));
}

TEST(VerifyTiling, RejectsBadCapacitiesAndGaps) {
  Decomposition wrong_cap = unit_subdivide(2);
  wrong_cap.parts[0].capacity = 2;
  EXPECT_FALSE(verify_tiling(wrong_cap).ok);
  Decomposition gap = unit_subdivide(2);
  gap.parts.pop_back();
  EXPECT_FALSE(verify_tiling(gap).ok);
  Decomposition outside = unit_subdivide(2);
  for (auto& v : outside.parts[0].polytope.vertices) v[0] += 5;
  EXPECT_FALSE(verify_tiling(outside).ok);
  // a non-unimodular triangle of the right area
  Decomposition skew{poly(2, {{0, 0}, {2, 0}, {0, 1}}), {DecompositionPart{poly(2, {{0, 0}, {2, 0}, {0, 1}}), 1}}};
  EXPECT_FALSE(verify_tiling(skew).ok);
}

TEST(Fig2, Examples) {
  Decomposition five = fig2_decomposition(5, 2);
  EXPECT_EQ(five.inventory(), (std::map<BigRational, std::size_t>{{25, 9}, {100, 1}}));
  BigRational area = 0;
  for (const auto& p : five.parts) area += p.polytope.volume();
  EXPECT_EQ(area, make_rational(125 * 125, 2));
  Decomposition two = fig2_decomposition(2, 1);
  EXPECT_EQ(two.inventory(), (std::map<BigRational, std::size_t>{{2, 4}}));
  EXPECT_TRUE(verify_tiling(two));
  EXPECT_THROW(fig2_decomposition(1, 1), InvalidInput);
}

TEST(Fig2, CountIdentitySweep) {
  for (unsigned long k = 2; k <= 10; ++k)
    for (unsigned long x = 1; x <= 3; ++x) {
      Decomposition d = fig2_decomposition(k, x);
      ASSERT_TRUE(verify_tiling(d)) << k << "," << x;
      BigInt s = pow_int(BigInt(k), x);
      ASSERT_EQ((k - 1) * (k - 1) * s * s + (2 * k - 1) * s * s, s * s * k * k);
      ASSERT_EQ(d.parts.size(), 2 * k);
    }
}

TEST(UnitSubdivide, Examples) {
  EXPECT_EQ(unit_subdivide(1).parts.size(), 1u);
  EXPECT_TRUE(verify_tiling(unit_subdivide(1)));
  EXPECT_EQ(unit_subdivide(2).parts.size(), 4u);
  EXPECT_TRUE(verify_tiling(unit_subdivide(2)));
  Decomposition five = unit_subdivide(5);
  EXPECT_EQ(five.parts.size(), 25u);
  EXPECT_TRUE(verify_tiling(five));
}

TEST(Property, InventoryMatchesBallProblem) {
  for (unsigned long k = 2; k <= 5; ++k)
    for (unsigned long x = 1; x <= 2; ++x) {
      Decomposition d = fig2_refined(k, x);
      ASSERT_TRUE(verify_tiling(d)) << k << "," << x;
      BigInt kk(k);
      auto problem = ellipsoid_to_ball_problem(1, pow_int(kk, 2 * x + 1), pow_int(kk, x), pow_int(kk, x + 1));
      std::map<BigRational, std::size_t> expected;
      for (const auto& b : problem.balls) expected[b.weight] += b.multiplicity.get_ui();
      ASSERT_EQ(d.inventory(), expected) << k << "," << x;
      ASSERT_EQ(d.whole.volume(), problem.target * problem.target / 2);
    }
}

TEST(Property, ThetaInvariants) {
  for (std::size_t n = 2; n <= 4; ++n) {
    UnimodularAffineMap theta = slice_shift(n);
    EXPECT_EQ(theta.determinant(), 1);
    for (std::size_t k = 1; k <= 10; ++k) {
      Subdivision s = subdivide(k, n);
      for (std::size_t j = 1; j <= k; ++j) {
        ASSERT_TRUE(s.theta.power(j - 1).apply(s.parts[j - 1]).same_vertices(s.parts[0])) << n << "," << k << "," << j;
        if (j > 1) ASSERT_TRUE(s.theta.apply(s.parts[j - 1]).same_vertices(s.parts[j - 2]));
      }
      Decomposition d = s.as_decomposition(BigInt(k));
      ASSERT_TRUE(verify_tiling(d)) << verify_tiling(d).reason;
      BigRational total = 0;
      for (const auto& p : d.parts) total += p.polytope.volume();
      ASSERT_EQ(total, d.whole.volume());
      ASSERT_EQ(d.whole.volume(), BigRational(static_cast<unsigned long>(k)) / factorial(n));
    }
  }
}

TEST(Property, MapsAreProducedAndRechecked) {
  Decomposition d = fig2_refined(3, 1);
  TilingReport r = verify_tiling(d);
  ASSERT_TRUE(r.ok);
  ASSERT_EQ(r.maps.size(), d.parts.size());
  for (std::size_t i = 0; i < d.parts.size(); ++i) {
    EXPECT_EQ(abs(BigRational(r.maps[i].determinant())), 1);
    EXPECT_TRUE(r.maps[i].apply(d.parts[i].polytope).same_vertices(standard_simplex(2, d.parts[i].capacity)));
  }
}

TEST(Property, AffineSliceCheckForHugeK) {
  EXPECT_TRUE(verify_slices_affine(BigInt("1553044545181"), 3).ok);
  EXPECT_TRUE(verify_slices_affine(BigInt(5), 4).ok);
}

TEST(Json, RoundTrip) {
  Decomposition d = fig2_decomposition(3, 1);
  auto j = decomposition_to_json(d);
  EXPECT_EQ(j["schema"], "symcap.decomposition/1");
  Decomposition back = decomposition_from_json(j);
  EXPECT_EQ(decomposition_to_json(back).dump(), j.dump());
  EXPECT_TRUE(verify_tiling(back));
}
