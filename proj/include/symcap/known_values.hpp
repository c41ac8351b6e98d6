#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "symcap/builders.hpp"
#include "symcap/capacities.hpp"
#include "symcap/certificate.hpp"

namespace symcap {

/// The only values of the 4-dimensional function g used here: g(b) = 2 on
/// [2, 4] and g(b) = sqrt(b) for b = 4 or b >= 289/36.
struct GValue {
  RealExpr value;
  bool from_sqrt_axiom = false;
};

inline std::optional<GValue> g_known(const RealExpr& b, const PrecisionBudget& budget = PrecisionBudget{}) {
  if (compare(b, RealExpr(2), budget) != Ordering::Less && compare(b, RealExpr(4), budget) != Ordering::Greater)
    return GValue{RealExpr(2), false};
  if (compare(b, RealExpr(kM2), budget) != Ordering::Less) return GValue{sqrt(b), true};
  return std::nullopt;
}

/// E(x, x b) -> B(x g(b)) by whichever axiom pins g(b) down.
inline EmbeddingCertificate g_certificate(const RealExpr& x, const RealExpr& b, const RealExpr& x_times_b, const GValue& g) {
  RealExpr r = x * g.value;
  ChainBuilder ch({x, x_times_b});
  if (g.from_sqrt_axiom)
    ch.step(rules::AxiomMSsqrt{b}, {r, r});
  else
    ch.step(rules::AxiomMSg2{b}, {r, r});
  return ch.finish(Ellipsoid::ball(r, 2));
}

struct OptimalityWitness {
  enum class Kind { EhIndex, Volume };
  Kind kind = Kind::Volume;
  std::size_t index = 0;

  std::string to_string() const { return kind == Kind::Volume ? "Volume" : "EH k=" + std::to_string(index); }
};

struct KnownValue {
  RealExpr value;
  std::string justification;  // L2.8, L2.9, L2.10, L2.12, L2.14 or T3.9
  OptimalityWitness witness;
};

namespace detail {

inline void check_order(const RealExpr& a, const RealExpr& b, const PrecisionBudget& budget) {
  if (compare(a, RealExpr(1), budget) == Ordering::Less || compare(a, b, budget) == Ordering::Greater)
    throw InvalidInput("f(a, b) needs 1 <= a <= b");
}

/// E(1, a, b) -> E(g, g, a) -> B(max(g, a)).
inline EmbeddingCertificate g_route(const RealExpr& a, const RealExpr& b, const GValue& g, const RealExpr& value) {
  ChainBuilder ch({RealExpr(1), a, b});
  ch.permute({0, 2, 1});
  ch.suspend(g_certificate(RealExpr(1), b, b, g), {g.value, g.value});
  ch.include(AxisTuple(3, value));
  return ch.finish(Ellipsoid::ball(value, 3));
}

inline bool within(const RealExpr& x, const RealExpr& lo, const RealExpr& hi, const PrecisionBudget& budget) {
  return compare(x, lo, budget) != Ordering::Less && compare(x, hi, budget) != Ordering::Greater;
}

}  // namespace detail

/// Exact value and matching embedding certificate when (a, b) lies in one of
/// the proven regions. Regions are tried in a fixed order; where they
/// overlap they agree.
inline std::optional<std::pair<KnownValue, EmbeddingCertificate>> known_value_with_certificate(
    const RealExpr& a, const RealExpr& b, const PrecisionBudget& budget = PrecisionBudget{}) {
  detail::check_order(a, b, budget);
  const RealExpr one(1), two(2);
  const OptimalityWitness eh3{OptimalityWitness::Kind::EhIndex, 3};
  const OptimalityWitness vol{OptimalityWitness::Kind::Volume, 0};

  if (compare(b, two, budget) != Ordering::Greater) {
    ChainBuilder ch({one, a, b});
    ch.include(AxisTuple(3, b));
    return std::make_pair(KnownValue{b, "L2.10", eh3}, ch.finish(Ellipsoid::ball(b, 3)));
  }
  std::optional<GValue> g = g_known(b, budget);
  if (g && compare(a, RealExpr(3), budget) != Ordering::Greater && compare(g->value, a, budget) != Ordering::Greater)
    return std::make_pair(KnownValue{a, "L2.9", eh3}, detail::g_route(a, b, *g, a));
  if (compare(a, two, budget) != Ordering::Greater && detail::within(b, two, RealExpr(4), budget))
    return std::make_pair(KnownValue{two, "L2.12", eh3}, detail::g_route(a, b, GValue{two, false}, two));
  if (compare(a, one, budget) == Ordering::Equal && detail::within(b, two, RealExpr(8), budget)) {
    ChainBuilder ch({one, one, b});
    ch.include({one, one, RealExpr(8)});
    ch.suspend(build_olga3(2, 3, budget), AxisTuple(3, two));
    return std::make_pair(KnownValue{two, "L2.14", eh3}, ch.finish(Ellipsoid::ball(two, 3)));
  }
  if (compare(b, RealExpr(9), budget) != Ordering::Less && compare(a, sqrt(b), budget) == Ordering::Equal) {
    RealExpr rb = sqrt(b);
    ChainBuilder ch({one, a, b});
    ch.permute({0, 2, 1});
    ch.suspend(ms_sqrt_certificate(one, b, b), {rb, rb});
    return std::make_pair(KnownValue{rb, "L2.8", vol}, ch.finish(Ellipsoid::ball(rb, 3)));
  }
  if (fullfill_case(a, b, budget) != FullfillCase::None)
    return std::make_pair(KnownValue{root(a * b, 3), "T3.9", vol}, build_fullfill2(a, b, budget));
  return std::nullopt;
}

/// f(a, b) where a proven region applies. The witness is re-checked: the
/// third capacity of E(1, a, b) or its volume radius must equal the value.
inline std::optional<KnownValue> f_known(const RealExpr& a, const RealExpr& b, const PrecisionBudget& budget = PrecisionBudget{}) {
  auto kv = known_value_with_certificate(a, b, budget);
  if (!kv) return std::nullopt;
  const KnownValue& v = kv->first;
  Ellipsoid e({RealExpr(1), a, b}, budget);
  RealExpr lower = v.witness.kind == OptimalityWitness::Kind::Volume
                       ? volume_radius(e, budget)
                       : ek_capacities(e, v.witness.index, budget)[v.witness.index - 1];
  if (compare(lower, v.value, budget) != Ordering::Equal)
    throw VerificationFailed("optimality witness " + v.witness.to_string() + " gives " + format(lower) + ", not " +
                             format(v.value));
  return v;
}

struct FBounds {
  RealExpr lower;
  RealExpr upper;
  /// Verified certificate for E(1, a, b) -> B(upper); empty only when the
  /// upper bound is the plain inclusion into B(b).
  std::optional<EmbeddingCertificate> certificate;
  /// Set when (a, b) is in a proven region.
  std::optional<KnownValue> known;
};

inline constexpr unsigned long kOlga3RouteMaxK = 200;

/// lower <= f(a, b) <= upper. The lower bound is ball_lower_bound; the upper
/// bound is the best of the available verified constructions.
inline FBounds f_bounds(const RealExpr& a, const RealExpr& b, std::size_t count = kDefaultEhCount,
                        const PrecisionBudget& budget = PrecisionBudget{}) {
  detail::check_order(a, b, budget);
  const RealExpr one(1);
  Ellipsoid e({one, a, b}, budget);
  FBounds out{ball_lower_bound(e, count, budget), b, std::nullopt, std::nullopt};

  std::vector<std::pair<RealExpr, EmbeddingCertificate>> candidates;
  if (auto kv = known_value_with_certificate(a, b, budget)) {
    out.known = f_known(a, b, budget);
    candidates.emplace_back(kv->first.value, std::move(kv->second));
  } else {
    if (auto g = g_known(b, budget)) {
      RealExpr v = compare(g->value, a, budget) == Ordering::Less ? a : g->value;
      candidates.emplace_back(v, detail::g_route(a, b, *g, v));
    }
    RealExpr ratio = b / a;
    if (auto g = g_known(ratio, budget)) {
      RealExpr v = a * g->value;
      ChainBuilder ch({one, a, b});
      ch.permute({1, 2, 0});
      ch.suspend(g_certificate(a, ratio, b, *g), {v, v});
      ch.include(AxisTuple(3, v));
      candidates.emplace_back(v, ch.finish(Ellipsoid::ball(v, 3)));
    }
    if (compare(a, one, budget) == Ordering::Equal && b.is_rational()) {
      BigInt k = ceil_root(ceil_of(b.rational_value()), 3);
      if (k < 2) k = 2;
      if (k <= kOlga3RouteMaxK) {
        RealExpr K(BigRational{k});
        ChainBuilder ch({one, one, b});
        ch.include({one, one, RealExpr(BigRational(pow_int(k, 3)))});
        ch.suspend(build_olga3(k, 3, budget), AxisTuple(3, K));
        candidates.emplace_back(K, ch.finish(Ellipsoid::ball(K, 3)));
      }
    }
  }
  for (auto& [value, cert] : candidates) {
    if (compare(value, out.upper, budget) == Ordering::Greater) continue;
    VerificationResult r = verify_certificate(cert, budget);
    if (!r) throw VerificationFailed("upper-bound certificate failed: " + r.to_string());
    out.upper = value;
    out.certificate = std::move(cert);
  }
  if (compare(out.lower, out.upper, budget) == Ordering::Greater)
    throw VerificationFailed("lower bound " + format(out.lower) + " exceeds upper bound " + format(out.upper));
  return out;
}

}  // namespace symcap
