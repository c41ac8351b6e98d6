#include <gtest/gtest.h>

#include <random>
#include <thread>

#include "oracles.hpp"

using namespace symcap;

namespace {

ClassVector cv(long d, std::vector<long> m) {
  ClassVector c{d, {}};
  for (long x : m) c.mults.emplace_back(x);
  return c;
}

BallPackingProblem problem(const BigRational& mu, const std::vector<BigRational>& w) {
  BallPackingProblem p{mu, {}};
  for (const auto& x : w) p.balls.push_back(WeightEntry{x, 1});
  return p;
}

std::set<std::string> canonical_orbit(std::size_t M, long degree) {
  std::set<std::string> out;
  for (const auto& c : oracle::exceptional_orbit(M, degree)) {
    ClassVector v{c.d, {}};
    for (long x : c.m) v.mults.emplace_back(x);
    out.insert(v.canonical().to_string());
  }
  return out;
}

/// p_k from the orbit oracle: k balls of capacity c fit in B(1) iff
/// k c^2 <= 1 and c sum(m) <= d for every class.
BigRational packing_number_oracle(std::size_t k) {
  BigRational best = 1;
  bool bound = false;
  for (const auto& c : oracle::exceptional_orbit(k, 6)) {
    long s = 0;
    for (long x : c.m) s += x;
    if (s <= 0) continue;
    BigRational r = make_rational(c.d, s);
    if (!bound || r < best) best = r, bound = true;
  }
  BigRational vol = BigRational(static_cast<unsigned long>(k)) * best * best;
  return vol >= 1 ? BigRational(1) : vol;
}

}  // namespace

TEST(IsExceptional, Examples) {
  EXPECT_TRUE(is_exceptional(cv(0, {-1})));
  EXPECT_TRUE(is_exceptional(cv(1, {1, 1})));
  EXPECT_FALSE(is_exceptional(cv(1, {1, 1, 1})));
  EXPECT_TRUE(is_exceptional(cv(2, {1, 1, 1, 1, 1})));
  EXPECT_TRUE(is_exceptional(cv(3, {2, 1, 1, 1, 1, 1, 1})));
  EXPECT_FALSE(is_exceptional(cv(3, {1, 1, 1, 1, 1, 1, 1, 1, 1, 1})));
}

TEST(EnumerateExceptional, Examples) {
  auto strings = [](const std::vector<ClassVector>& v) {
    std::vector<std::string> s;
    for (const auto& c : v) s.push_back(c.to_string());
    return s;
  };
  EXPECT_EQ(strings(enumerate_exceptional(2, 1)), (std::vector<std::string>{"(0;-1,0)", "(1;1,1)"}));
  EXPECT_EQ(strings(enumerate_exceptional(1, 1)), (std::vector<std::string>{"(0;-1)"}));
  auto five = enumerate_exceptional(5, 2);
  EXPECT_NE(std::find(five.begin(), five.end(), cv(2, {1, 1, 1, 1, 1})), five.end());
}

TEST(EnumerateExceptional, MatchesOrbitOracle) {
  for (std::size_t M = 1; M <= 8; ++M) {
    std::set<std::string> got;
    for (const auto& c : enumerate_exceptional(M, 6)) got.insert(c.to_string());
    EXPECT_EQ(got, canonical_orbit(M, 6)) << "M = " << M;
  }
  EXPECT_EQ(oracle::exceptional_orbit(8, 6).size(), 240u);
  EXPECT_EQ(oracle::exceptional_orbit(6, 6).size(), 27u);
}

TEST(Feasible, Examples) {
  EXPECT_TRUE(feasible(problem(2, {1, 1, 1, 1})).feasible());
  FeasibilityResult r = feasible(problem(make_rational(3, 2), {1, 1}));
  ASSERT_FALSE(r.feasible());
  ASSERT_TRUE(r.class_witness.has_value());
  EXPECT_EQ(r.class_witness->to_string(), "(1;1,1)");
  EXPECT_EQ(r.describe(), "Infeasible: witness (1;1,1)");
  EXPECT_TRUE(feasible(ellipsoid_to_ball_problem(1, 8, 2, 4)).feasible());
}

TEST(Feasible, VolumeWitness) {
  FeasibilityResult r = feasible(problem(1, {1, 1}));
  ASSERT_FALSE(r.feasible());
  ASSERT_TRUE(r.volume_witness.has_value());
  EXPECT_EQ(r.volume_witness->target_squared, 1);
  EXPECT_EQ(r.volume_witness->sum_of_squares, 2);
}

TEST(Feasible, InputValidation) {
  EXPECT_THROW(feasible(problem(0, {1})), InvalidInput);
  EXPECT_THROW(feasible(problem(1, {-1})), InvalidInput);
}

TEST(Feasible, LargeMultiplicitiesUseRunLength) {
  // (9; 1^27, 6, 3, 3) and the 24 million unit balls of olga2(290, 1)
  EXPECT_TRUE(feasible(ellipsoid_to_ball_problem(1, 27, 3, 9)).feasible());
  BigInt k = 290;
  EXPECT_TRUE(feasible(ellipsoid_to_ball_problem(1, k * k * k, k, k * k)).feasible());
}

TEST(PackingNumber, FrozenValues) {
  const std::vector<BigRational> expected{1, make_rational(1, 2), make_rational(3, 4), 1, make_rational(4, 5),
                                          make_rational(24, 25), make_rational(63, 64), make_rational(288, 289), 1};
  for (std::size_t k = 1; k <= 9; ++k) EXPECT_EQ(packing_number(k), expected[k - 1]) << "k = " << k;
  for (std::size_t k = 1; k <= 8; ++k) EXPECT_EQ(packing_number_oracle(k), expected[k - 1]) << "k = " << k;
  EXPECT_EQ(packing_number_detail(2).binding_class->to_string(), "(1;1,1)");
  EXPECT_FALSE(packing_number_detail(9).binding_class.has_value());
  EXPECT_EQ(packing_number(10), 1);
}

TEST(Property, CremonaPreservesInvariants) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<long> val(-20, 20);
  for (int i = 0; i < 10000; ++i) {
    BigInt d = val(rng), a = val(rng), b = val(rng), c = val(rng);
    BigInt self = d * d - a * a - b * b - c * c, anti = 3 * d - a - b - c;
    detail::cremona(d, a, b, c);
    ASSERT_EQ(d * d - a * a - b * b - c * c, self);
    ASSERT_EQ(3 * d - a - b - c, anti);
  }
}

TEST(Property, ReductionMatchesEnumerationSmall) {
  std::vector<std::vector<oracle::ExClass>> classes(6);
  for (std::size_t M = 1; M <= 5; ++M) classes[M] = oracle::exceptional_orbit(M, 6);
  std::vector<long> w;
  std::function<void(std::size_t, long)> rec = [&](std::size_t M, long max) {
    if (w.size() == M) {
      for (long mu = 1; mu <= 6; ++mu) {
        std::vector<BigRational> ws(w.begin(), w.end());
        bool got = feasible(problem(mu, ws)).feasible();
        ASSERT_EQ(got, oracle::feasible_by_classes(mu, w, classes[M])) << mu;
      }
      return;
    }
    for (long x = max; x >= 1; --x) {
      w.push_back(x);
      rec(M, x);
      w.pop_back();
    }
  };
  for (std::size_t M = 1; M <= 5; ++M) rec(M, 6);
}

TEST(Property, WitnessesAreGenuine) {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<long> num(1, 30), den(1, 6), count(1, 8);
  int infeasible = 0;
  for (int trial = 0; trial < 400; ++trial) {
    std::vector<BigRational> w;
    for (long i = 0, n = count(rng); i < n; ++i) w.push_back(make_rational(num(rng), den(rng)));
    BigRational mu = make_rational(num(rng) + 10, den(rng));
    FeasibilityResult r = feasible(problem(mu, w));
    BigRational sq = 0;
    for (const auto& x : w) sq += x * x;
    if (r.feasible()) {
      EXPECT_GE(mu * mu, sq);
      continue;
    }
    ++infeasible;
    if (r.volume_witness) {
      EXPECT_LT(mu * mu, sq);
    } else {
      ASSERT_TRUE(r.class_witness.has_value());
      EXPECT_TRUE(is_exceptional(*r.class_witness));
      EXPECT_LT(oracle::pairing(*r.class_witness, mu, w), 0) << r.class_witness->to_string();
    }
  }
  EXPECT_GT(infeasible, 20);
}

TEST(Property, PermutationAndScalingInvariance) {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<long> num(1, 20), den(1, 5), count(1, 7);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<BigRational> w;
    for (long i = 0, n = count(rng); i < n; ++i) w.push_back(make_rational(num(rng), den(rng)));
    BigRational mu = make_rational(num(rng) + 5, den(rng));
    bool base = feasible(problem(mu, w)).feasible();
    std::shuffle(w.begin(), w.end(), rng);
    ASSERT_EQ(feasible(problem(mu, w)).feasible(), base);
    BigRational t = make_rational(num(rng), den(rng));
    std::vector<BigRational> tw;
    for (const auto& x : w) tw.push_back(t * x);
    ASSERT_EQ(feasible(problem(t * mu, tw)).feasible(), base);
  }
}

TEST(Property, CacheIsTransparentUnderThreads) {
  auto classes = enumerate_exceptional(8, 6);
  std::vector<ClassVector> probes = classes;
  probes.push_back(cv(1, {1, 1, 1}));
  probes.push_back(cv(4, {2, 2, 2, 1, 1, 1, 1}));
  probes.push_back(cv(5, {2, 2, 2, 2, 2, 2, 1, 1}));
  std::vector<bool> plain;
  for (const auto& p : probes) plain.push_back(is_exceptional(p));
  ExceptionalCache cache;
  std::vector<std::thread> pool;
  std::atomic<int> mismatches{0};
  for (int t = 0; t < 8; ++t)
    pool.emplace_back([&] {
      for (int round = 0; round < 20; ++round)
        for (std::size_t i = 0; i < probes.size(); ++i)
          if (is_exceptional(probes[i], &cache) != plain[i]) ++mismatches;
    });
  for (auto& t : pool) t.join();
  EXPECT_EQ(mismatches.load(), 0);
  EXPECT_GT(cache.size(), 0u);
  EXPECT_LE(cache.size(), probes.size());
}
