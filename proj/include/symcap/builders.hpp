#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "symcap/certificate.hpp"
#include "symcap/ellipsoid.hpp"
#include "symcap/errors.hpp"
#include "symcap/exact.hpp"
#include "symcap/packing.hpp"
#include "symcap/toric.hpp"
#include "symcap/weights.hpp"

namespace symcap {

inline const BigRational kM2 = make_rational(289, 36);

/// beta_n = (r3 / (r3 - r2))^(2n(n-1)/(n-2)) with r_i the (2n-2)-th root of i.
inline RealExpr beta_expr(unsigned n) {
  if (n < 3) throw InvalidInput("beta_n is defined for n >= 3");
  unsigned long k = 2 * n - 2;
  RealExpr r3 = root(RealExpr(3), k), r2 = root(RealExpr(2), k);
  return pow(r3 / (r3 - r2), make_rational(2 * n * (n - 1), n - 2));
}

/// M_2 = 289/36 and M_n = max(M_{n-1}^2, beta_n), the branch picked by
/// certified comparison.
inline RealExpr stability_expr(unsigned n, const PrecisionBudget& budget = PrecisionBudget{}) {
  if (n < 2) throw InvalidInput("M_n is defined for n >= 2");
  RealExpr m = RealExpr(kM2);
  for (unsigned i = 3; i <= n; ++i) {
    RealExpr sq = m * m;
    RealExpr beta = beta_expr(i);
    m = compare(sq, beta, budget) == Ordering::Less ? beta : sq;
  }
  return m;
}

struct StabilityBounds {
  unsigned n = 2;
  std::optional<RealExpr> beta;
  std::optional<IntervalApprox> beta_interval;
  RealExpr M;
  IntervalApprox M_interval;
  /// True when M_n = beta_n rather than M_{n-1}^2.
  bool beta_dominates = false;
};

inline StabilityBounds stability_bounds(unsigned n, unsigned long bits = 64,
                                        const PrecisionBudget& budget = PrecisionBudget{}) {
  StabilityBounds s;
  s.n = n;
  s.M = stability_expr(n, budget);
  s.M_interval = eval_interval(s.M, bits, budget);
  if (n >= 3) {
    s.beta = beta_expr(n);
    s.beta_interval = eval_interval(*s.beta, bits, budget);
    s.beta_dominates = s.M.identical(*s.beta);
  }
  return s;
}

/// (289/36)^2 (1 + (289/36)^2 (3^(1/4) / (3^(1/4) - 2^(1/4)))^96)
inline RealExpr fullfill_hypothesis_expr() {
  RealExpr m2(kM2);
  RealExpr r3 = root(RealExpr(3), 4), r2 = root(RealExpr(2), 4);
  return m2 * m2 * (RealExpr(1) + m2 * m2 * pow(r3 / (r3 - r2), 96));
}

inline IntervalApprox fullfill_hypothesis_bound(unsigned long bits, const PrecisionBudget& budget = PrecisionBudget{}) {
  return eval_interval(fullfill_hypothesis_expr(), bits, budget);
}

namespace detail {

inline AxisTuple ones_then(std::size_t ones, const RealExpr& last) {
  AxisTuple t(ones, RealExpr(1));
  t.push_back(last);
  return t;
}

/// Permutation listing `front` first, then the remaining indices in order.
inline std::vector<std::size_t> bring_to_front(std::size_t n, const std::vector<std::size_t>& front) {
  std::vector<std::size_t> perm = front;
  std::vector<bool> used(n, false);
  for (auto i : front) used.at(i) = true;
  for (std::size_t i = 0; i < n; ++i)
    if (!used[i]) perm.push_back(i);
  return perm;
}

/// Indices of the first `count` entries of `t` equal to `value`, skipping
/// entries in `taken`.
inline std::vector<std::size_t> find_equal(const AxisTuple& t, const RealExpr& value, std::size_t count,
                                           const PrecisionBudget& budget) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < t.size() && out.size() < count; ++i)
    if (compare(t[i], value, budget) == Ordering::Equal) out.push_back(i);
  if (out.size() != count) throw VerificationFailed("chain builder lost track of an axis");
  return out;
}

}  // namespace detail

/// E(x, x b) -> B(x sqrt(b)) as a one-step certificate.
inline EmbeddingCertificate ms_sqrt_certificate(const RealExpr& x, const RealExpr& b, const RealExpr& x_times_b) {
  RealExpr r = x * sqrt(b);
  ChainBuilder ch({x, x_times_b});
  ch.step(rules::AxiomMSsqrt{b}, {r, r});
  return ch.finish(Ellipsoid::ball(r, 2));
}

/// E(1, k^(2x+1)) -> E(k^x, k^(x+1)), one ball-packing step.
inline EmbeddingCertificate build_olga2(const BigInt& k, unsigned long x) {
  if (k < 1) throw InvalidInput("olga2 needs k >= 1");
  if (x < 1) throw InvalidInput("olga2 needs x >= 1");
  BigInt f = pow_int(k, 2 * x + 1), c = pow_int(k, x), d = pow_int(k, x + 1);
  ChainBuilder ch({RealExpr(1), RealExpr(BigRational(f))});
  AxisTuple out{RealExpr(BigRational(c)), RealExpr(BigRational(d))};
  if (k == 1)
    ch.include(out);
  else
    ch.step(rules::BallPack4D{1, f, c, d}, out);
  return ch.finish(Ellipsoid(out));
}

/// E(1, ..., 1, k^n) -> B(k) in dimension 2n, by induction on n: odd n
/// splits off a 4-dimensional ball-packing step, even n squares k.
inline EmbeddingCertificate build_olga3(const BigInt& k, unsigned n, const PrecisionBudget& budget = PrecisionBudget{}) {
  if (k < 1) throw InvalidInput("olga3 needs k >= 1");
  if (n < 1) throw InvalidInput("olga3 needs n >= 1");
  const RealExpr K(BigRational{k});
  const RealExpr Kn(BigRational(pow_int(k, n)));
  const Ellipsoid target = Ellipsoid::ball(K, n);
  ChainBuilder ch(detail::ones_then(n - 1, Kn));
  if (n == 1 || k == 1) {
    ch.include(AxisTuple(n, K));
    return ch.finish(target);
  }
  if (n == 2) {
    ch.step(rules::AxiomMSsqrt{RealExpr(BigRational(k * k))}, {K, K});
    return ch.finish(target);
  }
  const RealExpr one(1);
  if (n % 2 == 1) {
    const unsigned m = (n - 1) / 2;
    const RealExpr km(BigRational(pow_int(k, m))), km1(BigRational(pow_int(k, m + 1)));
    ch.permute(detail::bring_to_front(n, {0, n - 1}));
    ch.suspend(build_olga2(k, m), {km, km1});
    // (k^m, k^(m+1), 1, ..., 1) -> (1^(m-1), k^m, 1^m, k^(m+1))
    std::vector<std::size_t> front;
    for (unsigned i = 0; i + 1 < m; ++i) front.push_back(2 + i);
    front.push_back(0);
    for (unsigned i = 0; i < m; ++i) front.push_back(2 + (m - 1) + i);
    front.push_back(1);
    ch.permute(front);
    ch.suspend(build_olga3(k, m, budget), AxisTuple(m, K));
    ch.permute(detail::bring_to_front(n, [&] {
      std::vector<std::size_t> f;
      for (unsigned i = m; i < n; ++i) f.push_back(i);
      return f;
    }()));
    ch.suspend(build_olga3(k, m + 1, budget), AxisTuple(m + 1, K));
    return ch.finish(target);
  }
  const unsigned m = n / 2;
  const BigInt k2 = k * k;
  const RealExpr K2(BigRational{k2});
  // (1^(2m-1), k^(2m)) -> (1^(m-1), k^(2m), 1^m)
  std::vector<std::size_t> front;
  for (unsigned i = 0; i + 1 < m; ++i) front.push_back(i);
  front.push_back(n - 1);
  ch.permute(detail::bring_to_front(n, front));
  ch.suspend(build_olga3(k2, m, budget), AxisTuple(m, K2));
  const EmbeddingCertificate split = build_olga3(k, 2, budget);
  for (unsigned i = 0; i < m; ++i) {
    std::size_t a = detail::find_equal(ch.current(), one, 1, budget)[0];
    std::size_t b = detail::find_equal(ch.current(), K2, 1, budget)[0];
    ch.permute(detail::bring_to_front(n, {a, b}));
    ch.suspend(split, {K, K});
  }
  return ch.finish(target);
}

/// E(1, ..., 1, b) -> B(b^(1/n)) for b >= M_n. The 4-dimensional lambda step
/// splits b into lambda sqrt(b) and sqrt(b)/lambda, the second factor is
/// handled one dimension down, and the rest is a rescaled olga3 with
/// F = floor(b^((n-2)/(2n(n-1)))).
inline EmbeddingCertificate build_olga4(const RealExpr& b, unsigned n, const PrecisionBudget& budget = PrecisionBudget{}) {
  if (n < 2) throw InvalidInput("olga4 needs n >= 2");
  if (compare(b, stability_expr(n, budget), budget) == Ordering::Less)
    throw HypothesisViolated("olga4 needs b >= M_" + std::to_string(n) + ", got b = " + format(b));
  const Ellipsoid target = Ellipsoid::ball(root(b, n), n);
  ChainBuilder ch(detail::ones_then(n - 1, b));
  if (n == 2) {
    RealExpr r = sqrt(b);
    ch.step(rules::AxiomMSsqrt{b}, {r, r});
    return ch.finish(target);
  }
  const BigRational r = make_rational(n - 2, 2 * n * (n - 1));
  const BigInt F = floor_expr(pow(b, r), budget);
  if (F < 1) throw VerificationFailed("floor of b^r vanished");
  const RealExpr lambda =
      RealExpr(BigRational(pow_int(F, n - 1))) * pow(b, -r * BigRational(static_cast<unsigned long>(n - 1)));
  const RealExpr rb = sqrt(b);
  const RealExpr small = lambda * rb, large = rb / lambda;

  ChainBuilder lam({RealExpr(1), b});
  lam.step(rules::AxiomLambda35{lambda, b}, {small, large});
  const EmbeddingCertificate lambda_cert = lam.finish(Ellipsoid({small, large}, budget));

  ch.permute(detail::bring_to_front(n, {0, n - 1}));
  ch.suspend(lambda_cert, {small, large});
  std::vector<std::size_t> front;
  for (unsigned i = 2; i < n; ++i) front.push_back(i);
  front.push_back(1);
  front.push_back(0);
  ch.permute(front);
  const EmbeddingCertificate lower = build_olga4(large, n - 1, budget);
  const RealExpr s = root(large, n - 1);
  ch.suspend(lower, AxisTuple(n - 1, s));
  ch.step(rules::Rescale{s, std::make_shared<const EmbeddingCertificate>(build_olga3(F, n, budget))},
          AxisTuple(n, s * RealExpr(BigRational{F})));
  return ch.finish(target);
}

/// Which hypothesis of the volume-filling construction applies.
enum class FullfillCase { None, LargeB, LargeA };

inline FullfillCase fullfill_case(const RealExpr& a, const RealExpr& b, const PrecisionBudget& budget = PrecisionBudget{}) {
  RealExpr m3 = stability_expr(3, budget);
  if (compare(b, m3 * m3 * m3 * m3 * a * a, budget) != Ordering::Less) return FullfillCase::LargeB;
  if (compare(a, RealExpr(kM2), budget) != Ordering::Less && compare(b, m3 * m3, budget) != Ordering::Less)
    return FullfillCase::LargeA;
  return FullfillCase::None;
}

/// E(1, a, b) -> B((ab)^(1/3)) when b >= M_3^4 a^2, or a >= 289/36 and
/// b >= M_3^2.
inline EmbeddingCertificate build_fullfill2(const RealExpr& a, const RealExpr& b,
                                            const PrecisionBudget& budget = PrecisionBudget{}) {
  if (compare(a, RealExpr(1), budget) == Ordering::Less || compare(a, b, budget) == Ordering::Greater)
    throw InvalidInput("fullfill2 needs 1 <= a <= b");
  const FullfillCase which = fullfill_case(a, b, budget);
  if (which == FullfillCase::None)
    throw HypothesisViolated("neither b >= M_3^4 a^2 nor (a >= 8 1/36 and b >= M_3^2) holds for a = " + format(a) +
                             ", b = " + format(b));
  const Ellipsoid target = Ellipsoid::ball(root(a * b, 3), 3);
  ChainBuilder ch({RealExpr(1), a, b});
  if (which == FullfillCase::LargeB) {
    const RealExpr rb = sqrt(b);
    ch.permute({0, 2, 1});
    ch.suspend(ms_sqrt_certificate(RealExpr(1), b, b), {rb, rb});
    ch.permute({2, 0, 1});
    const RealExpr t = pow(a, make_rational(1, 2)) * pow(b, make_rational(1, 4));
    EmbeddingCertificate second = ms_sqrt_certificate(a, rb / a, rb);
    ch.suspend(second, {t, t});
    const RealExpr inner_b = pow(b, make_rational(1, 4)) / pow(a, make_rational(1, 2));
    EmbeddingCertificate inner = build_olga4(inner_b, 3, budget);
    ch.step(rules::Rescale{t, std::make_shared<const EmbeddingCertificate>(inner)},
            AxisTuple(3, t * root(inner_b, 3)));
    return ch.finish(target);
  }
  const RealExpr ra = sqrt(a);
  ch.suspend(ms_sqrt_certificate(RealExpr(1), a, a), {ra, ra});
  const RealExpr inner_b = b / ra;
  EmbeddingCertificate inner = build_olga4(inner_b, 3, budget);
  ch.step(rules::Rescale{ra, std::make_shared<const EmbeddingCertificate>(inner)}, AxisTuple(3, ra * root(inner_b, 3)));
  return ch.finish(target);
}

struct LambdaTrickChecks {
  BigInt first_lhs, first_rhs;    // 3 u v q^2 <= v^2 p q
  BigInt second_lhs, second_rhs;  // 3 (v^2 - u^2) p q <= v^2 p q
  /// Outcome of the ball-packing cross-check; empty when the problem was
  /// too large to run.
  std::optional<bool> cross_check;
};

inline constexpr unsigned long kLambdaCrossCheckBalls = 5000;

inline LambdaTrickChecks lambdatrick_checks(const BigInt& u, const BigInt& v, const BigInt& p, const BigInt& q) {
  if (u <= 0 || v <= 0 || p <= 0 || q <= 0) throw InvalidInput("lambdatrick needs positive integers");
  if (u > v) throw HypothesisViolated("hypothesis u <= v fails");
  if (p < 3 * q) throw HypothesisViolated("hypothesis p >= 3q fails");
  if (2 * v * v > 3 * u * u) throw HypothesisViolated("hypothesis 2v^2 <= 3u^2 fails");
  LambdaTrickChecks c;
  c.first_lhs = 3 * u * v * q * q;
  c.first_rhs = v * v * p * q;
  c.second_lhs = 3 * (v * v - u * u) * p * q;
  c.second_rhs = v * v * p * q;
  if (c.first_lhs > c.first_rhs)
    throw HypothesisViolated("inequality 3uvq^2 <= v^2pq fails: " + c.first_lhs.get_str() + " > " + c.first_rhs.get_str());
  if (c.second_lhs > c.second_rhs)
    throw HypothesisViolated("inequality 3(v^2-u^2)pq <= v^2pq fails: " + c.second_lhs.get_str() + " > " +
                             c.second_rhs.get_str());
  BigInt e = u * v * q * q, f = u * v * p * p, cc = u * u * p * q, d = v * v * p * q;
  if (ball_problem_size(e, f, cc, d) <= kLambdaCrossCheckBalls) {
    c.cross_check = feasible(ellipsoid_to_ball_problem(e, f, cc, d)).feasible();
    if (!*c.cross_check) throw VerificationFailed("ball packing disagrees with the lambda rule");
  }
  return c;
}

/// E(1, p^2/q^2) -> E(up/(vq), vp/(uq)) as a single lambda step, after
/// running the rational sufficiency checks.
inline EmbeddingCertificate build_lambdatrick(const BigInt& u, const BigInt& v, const BigInt& p, const BigInt& q) {
  lambdatrick_checks(u, v, p, q);
  BigRational lambda = make_rational(u, v), b = make_rational(p * p, q * q);
  RealExpr lo(make_rational(u * p, v * q)), hi(make_rational(v * p, u * q));
  ChainBuilder ch({RealExpr(1), RealExpr(b)});
  ch.step(rules::AxiomLambda35{RealExpr(lambda), RealExpr(b)}, {lo, hi});
  return ch.finish(Ellipsoid({lo, hi}));
}

/// Full packing of CP^n-type ellipsoid by k balls: the toric slicing of the
/// moment polytope of E(1, ..., 1, k) plus an ellipsoid certificate
/// E(1, ..., 1, k) -> B(k^(1/n)).
struct PackCertificate {
  BigInt k;
  unsigned n = 2;
  TilingReport toric;
  bool toric_explicit = true;
  EmbeddingCertificate ellipsoid;
};

inline constexpr unsigned long kExplicitSliceLimit = 64;

inline TilingReport pack_toric_check(const BigInt& k, unsigned n, bool& explicit_check) {
  explicit_check = k <= kExplicitSliceLimit;
  if (explicit_check) {
    std::size_t kk = k.get_ui();
    return verify_tiling(subdivide(kk, n).as_decomposition(k));
  }
  return verify_slices_affine(k, n);
}

inline PackCertificate build_pack(const BigInt& k, unsigned n, const PrecisionBudget& budget = PrecisionBudget{}) {
  if (k < 1) throw InvalidInput("build_pack needs k >= 1");
  if (n < 2) throw InvalidInput("build_pack needs n >= 2");
  RealExpr K(BigRational{k});
  if (compare(K, stability_expr(n, budget), budget) == Ordering::Less)
    throw HypothesisViolated("k = " + k.get_str() + " is below M_" + std::to_string(n));
  PackCertificate pc{k, n, {}, true, build_olga4(K, n, budget)};
  pc.toric = pack_toric_check(k, n, pc.toric_explicit);
  if (!pc.toric) throw VerificationFailed("toric slicing failed: " + pc.toric.reason);
  return pc;
}

inline VerificationResult verify_pack(const PackCertificate& pc, const PrecisionBudget& budget = PrecisionBudget{}) {
  bool explicit_check = true;
  TilingReport t = pack_toric_check(pc.k, pc.n, explicit_check);
  if (!t) return VerificationResult{false, 0, "toric slicing: " + t.reason};
  RealExpr K(BigRational{pc.k});
  if (!detail::tuples_equal(pc.ellipsoid.source.axes(), detail::ones_then(pc.n - 1, K), budget))
    return VerificationResult{false, 0, "ellipsoid certificate does not start at E(1, ..., 1, k)"};
  if (!detail::same_multiset(pc.ellipsoid.target.axes(), AxisTuple(pc.n, root(K, pc.n)), budget))
    return VerificationResult{false, 0, "ellipsoid certificate does not end at B(k^(1/n))"};
  return verify_certificate(pc.ellipsoid, budget);
}

}  // namespace symcap
