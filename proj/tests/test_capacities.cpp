#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace symcap;

namespace {

Ellipsoid rational_ellipsoid(std::initializer_list<BigRational> axes) {
  std::vector<RealExpr> v;
  for (const auto& a : axes) v.emplace_back(a);
  return Ellipsoid(v);
}

std::vector<BigRational> as_rationals(const CapacityList& caps) {
  std::vector<BigRational> out;
  for (const auto& c : caps) {
    EXPECT_TRUE(c.is_rational());
    out.push_back(c.rational_value());
  }
  return out;
}

}  // namespace

TEST(EkCapacities, Examples) {
  EXPECT_EQ(format_list(ek_capacities(Ellipsoid::parse("1,3/2,2"), 3)), "1, 3/2, 2");
  EXPECT_EQ(format_list(ek_capacities(Ellipsoid::parse("2,2,2"), 6)), "2, 2, 2, 4, 4, 4");
  EXPECT_EQ(format_list(ek_capacities(Ellipsoid::parse("1,2"), 6)), "1, 2, 2, 3, 4, 4");
  auto oracle = oracle::eh_enumerate({1, 2}, 6);
  EXPECT_EQ(as_rationals(ek_capacities(Ellipsoid::parse("1,2"), 6)), oracle);
}

TEST(EkCapacities, IrrationalAxesStaySymbolic) {
  Ellipsoid e({RealExpr(1), sqrt(RealExpr(2))});
  CapacityList caps = ek_capacities(e, 4);
  EXPECT_EQ(compare(caps[1], sqrt(RealExpr(2))), Ordering::Equal);
  EXPECT_EQ(compare(caps[2], RealExpr(2)), Ordering::Equal);
  EXPECT_EQ(compare(caps[3], RealExpr(2) * sqrt(RealExpr(2))), Ordering::Equal);
}

TEST(EkObstruction, Examples) {
  EXPECT_EQ(ek_obstruction(Ellipsoid::parse("1,3/2,7/4"), Ellipsoid::parse("3/2,3/2,3/2"), 3), std::optional<std::size_t>(3));
  EXPECT_EQ(ek_obstruction(Ellipsoid::parse("1,1,1"), Ellipsoid::parse("1,1,1"), 100), std::nullopt);
  EXPECT_EQ(ek_obstruction(Ellipsoid::parse("1,1,8"), Ellipsoid::parse("2,2,2"), 50), std::nullopt);
  EXPECT_THROW(ek_obstruction(Ellipsoid::parse("1,1"), Ellipsoid::parse("1,1,1"), 5), InvalidInput);
}

TEST(VolumeObstruction, Examples) {
  EXPECT_EQ(volume_obstruction(Ellipsoid::parse("1,2,36"), Ellipsoid::parse("4,4,4")), Verdict::Fail);
  Ellipsoid e = Ellipsoid::parse("1,2,3");
  EXPECT_EQ(volume_obstruction(e, Ellipsoid::ball(root(RealExpr(6), 3), 3)), Verdict::Pass);
  EXPECT_EQ(volume_obstruction(Ellipsoid::parse("1,1,8"), Ellipsoid::parse("2,2,2")), Verdict::Pass);
}

TEST(BallLowerBound, Examples) {
  auto d = ball_lower_bound_detail(Ellipsoid::parse("1,1,4"));
  EXPECT_EQ(format(d.value), "2");
  EXPECT_EQ(d.eh_index, std::optional<std::size_t>(3));
  EXPECT_EQ(format(ball_lower_bound(Ellipsoid::parse("1,1,1"))), "1");
  auto v = ball_lower_bound_detail(Ellipsoid::parse("1,3,20"));
  EXPECT_EQ(compare(v.value, root(RealExpr(60), 3)), Ordering::Equal);
  EXPECT_FALSE(v.eh_index.has_value());
}

TEST(Ellipsoid, Validation) {
  EXPECT_THROW(Ellipsoid::parse("1,0"), InvalidInput);
  EXPECT_THROW(Ellipsoid::parse("1,-2"), InvalidInput);
  EXPECT_EQ(Ellipsoid::parse("3,1,2").to_string(), "E(1, 2, 3)");
}

TEST(Property, BallFormula) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<long> num(1, 1000), den(1, 97);
  for (int trial = 0; trial < 20; ++trial) {
    BigRational c = make_rational(num(rng), den(rng));
    for (std::size_t n = 2; n <= 5; ++n) {
      CapacityList caps = ek_capacities(Ellipsoid::ball(RealExpr(c), n), 100);
      for (std::size_t k = 1; k <= 100; ++k)
        ASSERT_EQ(caps[k - 1].rational_value(), c * BigRational(static_cast<unsigned long>((k + n - 1) / n)));
    }
  }
}

TEST(Property, MergeMatchesEnumerateAndSort) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<long> num(1, 60), den(1, 12), dim(1, 5), count(1, 200);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<BigRational> axes;
    std::vector<RealExpr> exprs;
    for (long i = 0, n = dim(rng); i < n; ++i) {
      axes.push_back(make_rational(num(rng), den(rng)));
      exprs.emplace_back(axes.back());
    }
    auto k = static_cast<std::size_t>(count(rng));
    ASSERT_EQ(as_rationals(ek_capacities(Ellipsoid(exprs), k)), oracle::eh_enumerate(axes, k));
  }
}

TEST(Property, ScaleEquivariance) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<long> num(1, 40), den(1, 9);
  for (int trial = 0; trial < 50; ++trial) {
    Ellipsoid e = rational_ellipsoid({make_rational(num(rng), den(rng)), make_rational(num(rng), den(rng)),
                                      make_rational(num(rng), den(rng))});
    BigRational t = make_rational(num(rng), den(rng));
    auto base = as_rationals(ek_capacities(e, 60));
    auto scaled = as_rationals(ek_capacities(e.scaled(RealExpr(t)), 60));
    for (std::size_t i = 0; i < base.size(); ++i) ASSERT_EQ(scaled[i], t * base[i]);
  }
}

TEST(Property, MonotoneInAxes) {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<long> num(1, 40), den(1, 9), which(0, 2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<BigRational> a{make_rational(num(rng), den(rng)), make_rational(num(rng), den(rng)),
                               make_rational(num(rng), den(rng))};
    std::vector<BigRational> b = a;
    b[static_cast<std::size_t>(which(rng))] += make_rational(num(rng), den(rng));
    auto ca = oracle::eh_enumerate(a, 80);
    auto cb = as_rationals(ek_capacities(Ellipsoid({RealExpr(b[0]), RealExpr(b[1]), RealExpr(b[2])}), 80));
    auto cb_small = as_rationals(ek_capacities(Ellipsoid({RealExpr(a[0]), RealExpr(a[1]), RealExpr(a[2])}), 80));
    EXPECT_EQ(cb_small, ca);
    for (std::size_t i = 0; i < ca.size(); ++i) ASSERT_LE(ca[i], cb[i]);
  }
}
