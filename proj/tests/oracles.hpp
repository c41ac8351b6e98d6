#pragma once

// Independent reference implementations used to derive and freeze expected
// values. None of these call the code paths they are compared against.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <queue>
#include <random>
#include <set>
#include <vector>

#include "symcap/symcap.hpp"

namespace oracle {

using symcap::BigInt;
using symcap::BigRational;

/// First `count` entries of the sorted multiset {j a_i : 1 <= j <= count}.
inline std::vector<BigRational> eh_enumerate(const std::vector<BigRational>& axes, std::size_t count) {
  std::vector<BigRational> all;
  for (const auto& a : axes)
    for (std::size_t j = 1; j <= count; ++j) all.push_back(a * BigRational(static_cast<unsigned long>(j)));
  std::sort(all.begin(), all.end());
  all.resize(count);
  return all;
}

/// Plain Euclid on (f, e): the terms of f/e.
inline std::vector<long> euclid(long e, long f) {
  std::vector<long> out;
  long a = f, b = e;
  while (b != 0) {
    out.push_back(a / b);
    long r = a % b;
    a = b;
    b = r;
  }
  return out;
}

/// Weight sequence by repeated square cutting: remove the largest square
/// from an e x f rectangle until nothing is left.
inline std::vector<long> square_cut(long e, long f) {
  std::vector<long> out;
  long a = std::min(e, f), b = std::max(e, f);
  while (a > 0) {
    out.push_back(a);
    b -= a;
    if (b < a) std::swap(a, b);
  }
  return out;
}

struct ExClass {
  long d;
  std::vector<long> m;
  bool operator<(const ExClass& o) const { return d != o.d ? d < o.d : m < o.m; }
};

/// Every exceptional class in the blow-up of CP^2 at `slots` points with
/// degree <= max_degree, in every slot order. Orbit of E_1 under slot
/// permutations and the Cremona reflection on slots 0, 1, 2, explored
/// breadth first with a degree cap of 2 max_degree + 4 on intermediates.
inline std::vector<ExClass> exceptional_orbit(std::size_t slots, long max_degree) {
  std::size_t M = std::max<std::size_t>(slots, 3);
  long cap = 2 * max_degree + 4;
  std::set<ExClass> seen;
  std::queue<ExClass> todo;
  ExClass start{0, std::vector<long>(M, 0)};
  start.m[0] = -1;
  seen.insert(start);
  todo.push(start);
  auto visit = [&](ExClass c) {
    if (c.d > cap || c.d < 0) return;
    if (seen.insert(c).second) todo.push(std::move(c));
  };
  while (!todo.empty()) {
    ExClass c = todo.front();
    todo.pop();
    for (std::size_t i = 0; i < M; ++i)
      for (std::size_t j = i + 1; j < M; ++j) {
        ExClass s = c;
        std::swap(s.m[i], s.m[j]);
        visit(s);
      }
    long t = c.d - c.m[0] - c.m[1] - c.m[2];
    ExClass r = c;
    r.d += t;
    for (int i = 0; i < 3; ++i) r.m[i] += t;
    visit(r);
  }
  std::vector<ExClass> out;
  for (const auto& c : seen) {
    if (c.d > max_degree) continue;
    bool fits = true;
    for (std::size_t i = slots; i < M; ++i) fits = fits && c.m[i] == 0;
    if (!fits) continue;
    ExClass t{c.d, std::vector<long>(c.m.begin(), c.m.begin() + static_cast<long>(slots))};
    out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(), [](const ExClass& a, const ExClass& b) {
              return a.d == b.d && a.m == b.m;
            }), out.end());
  return out;
}

/// Balls of capacities w pack into B(mu) iff mu^2 >= sum w^2 and
/// d mu >= sum m_i w_i for every exceptional class.
inline bool feasible_by_classes(long mu, const std::vector<long>& w, const std::vector<ExClass>& classes) {
  long sq = 0;
  for (long x : w) sq += x * x;
  if (mu * mu < sq) return false;
  for (const auto& c : classes) {
    long s = 0;
    for (std::size_t i = 0; i < w.size(); ++i) s += c.m[i] * w[i];
    if (c.d * mu < s) return false;
  }
  return true;
}

/// Evaluates a class against (mu; w) with exact rationals.
inline BigRational pairing(const symcap::ClassVector& c, const BigRational& mu, const std::vector<BigRational>& w) {
  BigRational s = BigRational(c.degree) * mu;
  for (std::size_t i = 0; i < c.mults.size() && i < w.size(); ++i) s -= BigRational(c.mults[i]) * w[i];
  return s;
}

/// Random certificate from the builders, optionally rescaled and followed by
/// an inclusion into a slightly larger ellipsoid.
class CertificateFactory {
 public:
  explicit CertificateFactory(std::uint64_t seed) : rng_(seed) {}

  symcap::EmbeddingCertificate next() {
    using namespace symcap;
    EmbeddingCertificate c = base();
    if (pick(0, 2) == 0) c = scale_certificate(c, RealExpr(symcap::make_rational(BigInt(pick(1, 35)), BigInt(pick(1, 5)))));
    if (pick(0, 2) == 0) {
      AxisTuple cur = final_axes(c);
      AxisTuple bigger;
      for (const auto& v : cur) bigger.push_back(v + RealExpr(uniform(0, 3, 4)));
      EmbeddingCertificate out = c;
      out.steps.push_back(EmbeddingStep{rules::Inclusion{}, bigger});
      out.target = Ellipsoid(bigger);
      c = out;
    }
    return c;
  }

 private:
  long pick(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }

  /// Uniform over fractions n/d in [lo, hi] with 1 <= d <= max_den.
  BigRational uniform(long lo, long hi, long max_den) {
    long d = pick(1, max_den);
    return symcap::make_rational(BigInt(pick(lo * d, hi * d)), BigInt(d));
  }

  symcap::EmbeddingCertificate base() {
    using namespace symcap;
    switch (pick(0, 7)) {
      case 0:
        return build_olga2(BigInt(pick(1, 4)), static_cast<unsigned long>(pick(1, 2)));
      case 1:
        return build_olga3(BigInt(pick(1, 3)), static_cast<unsigned>(pick(1, 4)));
      case 2: {
        BigInt b = pick(9, 60);
        return build_olga4(RealExpr(BigRational(b)), 2);
      }
      case 3: {
        static const long params[][4] = {{5, 6, 3, 1}, {1, 1, 3, 1}, {9, 10, 4, 1}, {5, 6, 7, 2}, {1, 1, 5, 1}};
        const auto& p = params[pick(0, 4)];
        return build_lambdatrick(p[0], p[1], p[2], p[3]);
      }
      case 4: {
        // f_bounds routes over a small rational grid
        BigRational a = uniform(1, 3, 3);
        BigRational b = a + uniform(0, 20, 3);
        FBounds fb = f_bounds(RealExpr(a), RealExpr(b), 30);
        if (fb.certificate) return *fb.certificate;
        return inclusion(AxisTuple{RealExpr(1), RealExpr(a), RealExpr(b)});
      }
      case 5: {
        AxisTuple t;
        for (int i = 0; i < pick(1, 4); ++i) t.push_back(RealExpr(uniform(1, 5, 4)));
        return inclusion(t);
      }
      case 6: {
        BigRational x = uniform(1, 3, 3);
        BigRational b = uniform(2, 4, 6);
        return g_certificate(RealExpr(x), RealExpr(b), RealExpr(x * b), GValue{RealExpr(2), false});
      }
      default: {
        BigRational x = uniform(1, 2, 3);
        AxisTuple t{RealExpr(x), RealExpr(x * uniform(1, 2, 4))};
        ChainBuilder ch(t);
        ch.step(rules::AxiomTwoA1{}, AxisTuple(2, t[1]));
        return ch.finish(Ellipsoid::ball(t[1], 2));
      }
    }
  }

  static symcap::EmbeddingCertificate inclusion(const symcap::AxisTuple& t) {
    using namespace symcap;
    Ellipsoid e(t);
    RealExpr top = e.axes().back();
    ChainBuilder ch(e.axes());
    ch.include(AxisTuple(t.size(), top));
    return ch.finish(Ellipsoid::ball(top, t.size()));
  }

  std::mt19937_64 rng_;
};

}  // namespace oracle
