#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "symcap/errors.hpp"
#include "symcap/rational.hpp"
#include "symcap/real_expr.hpp"

namespace symcap {

/// Upper bound on the working precision used by comparisons.
struct PrecisionBudget {
  unsigned long max_bits = 4096;

  PrecisionBudget() = default;
  explicit PrecisionBudget(unsigned long bits) : max_bits(bits) {
    if (bits < 64) throw InvalidInput("precision budget must be at least 64 bits");
  }
};

/// Closed interval with dyadic endpoints known to contain a real value.
struct IntervalApprox {
  BigRational lo;
  BigRational hi;
  unsigned long precision_bits = 0;

  BigRational width() const { return hi - lo; }
  bool contains(const BigRational& q) const { return lo <= q && q <= hi; }
  bool contains(const IntervalApprox& other) const { return lo <= other.lo && other.hi <= hi; }
};

enum class Ordering { Less, Equal, Greater };

inline const char* to_string(Ordering o) {
  switch (o) {
    case Ordering::Less: return "Less";
    case Ordering::Equal: return "Equal";
    case Ordering::Greater: return "Greater";
  }
  return "?";
}

inline BigInt floor_expr(const RealExpr& expr, const PrecisionBudget& budget = PrecisionBudget{});

namespace detail {

// ---------------------------------------------------------------------------
// Symbolic normal form.
//
// A term is coeff * prod base^exp with positive rational bases. After
// `simplify`, the bases of a polynomial are drawn from one set of pairwise
// coprime integers, none a perfect power, and every exponent lies in (0, 1).
// Under those conditions two terms denote the same real number exactly when
// they have the same coefficient and the same base/exponent map, so an
// expression is zero iff its simplified polynomial is empty.
//
// Sums that cannot be folded into a monomial (a two-term denominator, a
// root of a sum) become positive atoms. With atoms present an empty
// polynomial still proves zero, but a nonempty one proves nothing beyond
// what the coefficient signs give.
// ---------------------------------------------------------------------------

struct Term {
  BigRational coeff;
  std::map<BigRational, BigRational> powers;  // base > 0, base != 1, exp != 0
  /// Positive sums that do not reduce to a monomial, keyed by their
  /// canonical form. Identical keys denote identical reals; distinct keys
  /// are not assumed to be independent.
  std::map<std::string, BigRational> atoms;
};
using Poly = std::vector<Term>;

inline constexpr std::size_t kMaxTerms = 256;
inline constexpr long kMaxExpandExponent = 64;
inline constexpr long kMaxMonomialExponent = 1 << 16;

template <class Map>
inline void add_exponent(Map& m, const typename Map::key_type& key, const BigRational& e) {
  BigRational s = m[key] + e;
  if (s == 0)
    m.erase(key);
  else
    m[key] = s;
}

inline Term multiply(const Term& a, const Term& b) {
  Term r{a.coeff * b.coeff, a.powers, a.atoms};
  for (const auto& [base, e] : b.powers) add_exponent(r.powers, base, e);
  for (const auto& [key, e] : b.atoms) add_exponent(r.atoms, key, e);
  return r;
}

inline std::optional<Poly> multiply(const Poly& a, const Poly& b) {
  if (a.size() * b.size() > kMaxTerms) return std::nullopt;
  Poly r;
  r.reserve(a.size() * b.size());
  for (const auto& x : a)
    for (const auto& y : b) r.push_back(multiply(x, y));
  return r;
}

inline Term invert(const Term& t) {
  Term r{BigRational(1) / t.coeff, {}, {}};
  for (const auto& [base, e] : t.powers) r.powers.emplace(base, -e);
  for (const auto& [key, e] : t.atoms) r.atoms.emplace(key, -e);
  return r;
}

inline Term power(const Term& t, const BigRational& e) {
  Term r{1, {}, {}};
  if (is_integer(e)) {
    r.coeff = pow_int(t.coeff, e.get_num().get_si());
  } else if (t.coeff != 1) {
    r.powers.emplace(t.coeff, e);
  }
  for (const auto& [base, x] : t.powers) add_exponent(r.powers, base, x * e);
  for (const auto& [key, x] : t.atoms) add_exponent(r.atoms, key, x * e);
  return r;
}

/// Pairwise coprime integers > 1 whose products generate every input.
inline std::vector<BigInt> gcd_free_basis(const std::vector<BigInt>& inputs) {
  std::vector<BigInt> basis;
  std::vector<BigInt> pending(inputs.begin(), inputs.end());
  while (!pending.empty()) {
    BigInt y = std::move(pending.back());
    pending.pop_back();
    if (y <= 1) continue;
    bool placed = false;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      BigInt d = gcd(y, basis[i]);
      if (d == 1) continue;
      if (d == basis[i] && d == y) {
        placed = true;
        break;
      }
      BigInt g = basis[i];
      basis.erase(basis.begin() + static_cast<std::ptrdiff_t>(i));
      pending.push_back(d);
      pending.push_back(g / d);
      pending.push_back(y / d);
      placed = true;
      break;
    }
    if (!placed) basis.push_back(std::move(y));
  }
  return basis;
}

/// Writes g = root^k with k maximal.
inline std::pair<BigInt, unsigned long> perfect_power_root(const BigInt& g) {
  if (!mpz_perfect_power_p(g.get_mpz_t())) return {g, 1};
  auto top = static_cast<unsigned long>(mpz_sizeinbase(g.get_mpz_t(), 2));
  for (unsigned long k = top; k >= 2; --k) {
    BigInt r;
    if (mpz_root(r.get_mpz_t(), g.get_mpz_t(), k) != 0 && r > 1) return {r, k};
  }
  return {g, 1};
}

inline long valuation(BigInt x, const BigInt& h) {
  long v = 0;
  while (x != 0 && mpz_divisible_p(x.get_mpz_t(), h.get_mpz_t())) {
    x /= h;
    ++v;
  }
  return v;
}

/// Canonical form described above; combines like terms and drops zeros.
inline Poly simplify(const Poly& p) {
  std::vector<BigInt> ints;
  for (const auto& t : p)
    for (const auto& [base, e] : t.powers) {
      if (base.get_num() > 1) ints.push_back(base.get_num());
      if (base.get_den() > 1) ints.push_back(base.get_den());
    }
  std::vector<BigInt> basis;
  for (const auto& g : gcd_free_basis(ints)) basis.push_back(perfect_power_root(g).first);

  using Key = std::pair<std::map<BigRational, BigRational>, std::map<std::string, BigRational>>;
  std::map<Key, BigRational> combined;
  for (const auto& t : p) {
    BigRational coeff = t.coeff;
    std::map<BigRational, BigRational> key;
    for (const auto& h : basis) {
      BigRational total = 0;
      for (const auto& [base, e] : t.powers) {
        long v = valuation(base.get_num(), h) - valuation(base.get_den(), h);
        if (v != 0) total += e * v;
      }
      if (total == 0) continue;
      BigInt whole = floor_of(total);
      BigRational frac = total - BigRational(whole);
      if (whole != 0) coeff *= pow_int(BigRational(h), to_int64(whole));
      if (frac != 0) key.emplace(BigRational(h), frac);
    }
    combined[Key{std::move(key), t.atoms}] += coeff;
  }
  Poly out;
  for (auto& [key, coeff] : combined)
    if (coeff != 0) out.push_back(Term{coeff, key.first, key.second});
  return out;
}

inline std::string poly_key(const Poly& p) {
  std::string s = "{";
  for (const auto& t : p) {
    s += to_string(t.coeff);
    for (const auto& [base, e] : t.powers) s += "*" + to_string(base) + "^" + to_string(e);
    for (const auto& [key, e] : t.atoms) s += "*" + key + "^" + to_string(e);
    s += ";";
  }
  return s + "}";
}

/// Sign of an expression by interval evaluation at moderate precision.
inline std::optional<int> interval_sign(const RealExpr& e, const PrecisionBudget& budget);

/// p^ex for a multi-term simplified p, as a single atom term. Needs the
/// sign of p: fractional exponents require p > 0, negative ones p != 0.
inline std::optional<Poly> atom_power(const Poly& p, const RealExpr& source, const BigRational& ex,
                                      const PrecisionBudget& budget) {
  auto sign = interval_sign(source, budget);
  if (!sign || *sign == 0) return std::nullopt;
  Term t{1, {}, {}};
  if (*sign > 0) {
    t.atoms.emplace(poly_key(p), ex);
    return Poly{t};
  }
  if (!is_integer(ex)) throw DomainError("fractional power of a negative quantity");
  Poly neg = p;
  for (auto& x : neg) x.coeff = -x.coeff;
  t.atoms.emplace(poly_key(neg), ex);
  if (mpz_odd_p(ex.get_num().get_mpz_t())) t.coeff = -1;
  return Poly{t};
}

inline std::optional<Poly> normalize(const RealExpr& e, const PrecisionBudget& budget);

inline std::optional<Poly> normalize_power(const RealExpr& e, const PrecisionBudget& budget) {
  auto base = normalize(e.arg(), budget);
  if (!base) return std::nullopt;
  Poly b = simplify(*base);
  const BigRational& ex = e.exponent();
  if (is_integer(ex)) {
    if (!ex.get_num().fits_slong_p()) return std::nullopt;
    long n = ex.get_num().get_si();
    if (b.empty()) {
      if (n < 0) throw DomainError("zero raised to a negative power");
      return n == 0 ? Poly{Term{1, {}}} : Poly{};
    }
    if (b.size() == 1) {
      if (n > kMaxMonomialExponent || n < -kMaxMonomialExponent) return std::nullopt;
      return Poly{power(b[0], ex)};
    }
    if (n < 0 || n > kMaxExpandExponent) return atom_power(b, e.arg(), ex, budget);
    Poly acc{Term{1, {}}};
    for (long i = 0; i < n; ++i) {
      auto next = multiply(acc, b);
      if (!next) return atom_power(b, e.arg(), ex, budget);
      acc = simplify(*next);
    }
    return acc;
  }
  if (b.empty()) {
    if (ex < 0) throw DomainError("zero raised to a negative power");
    return Poly{};
  }
  if (b.size() != 1) return atom_power(b, e.arg(), ex, budget);
  if (b[0].coeff < 0) throw DomainError("fractional power of a negative quantity");
  return Poly{power(b[0], ex)};
}

inline std::optional<Poly> normalize(const RealExpr& e, const PrecisionBudget& budget) {
  using K = RealExpr::Kind;
  switch (e.kind()) {
    case K::Rational:
      if (e.rational_value() == 0) return Poly{};
      return Poly{Term{e.rational_value(), {}}};
    case K::Sum:
    case K::Difference: {
      auto a = normalize(e.lhs(), budget);
      if (!a) return std::nullopt;
      auto b = normalize(e.rhs(), budget);
      if (!b) return std::nullopt;
      if (a->size() + b->size() > kMaxTerms) return std::nullopt;
      for (auto& t : *b) {
        if (e.kind() == K::Difference) t.coeff = -t.coeff;
        a->push_back(std::move(t));
      }
      return a;
    }
    case K::Product: {
      auto a = normalize(e.lhs(), budget);
      if (!a) return std::nullopt;
      auto b = normalize(e.rhs(), budget);
      if (!b) return std::nullopt;
      return multiply(*a, *b);
    }
    case K::Quotient: {
      auto a = normalize(e.lhs(), budget);
      if (!a) return std::nullopt;
      auto b = normalize(e.rhs(), budget);
      if (!b) return std::nullopt;
      Poly d = simplify(*b);
      if (d.empty()) throw DomainError("division by an expression equal to zero");
      if (d.size() != 1) {
        auto inv = atom_power(d, e.rhs(), BigRational(-1), budget);
        if (!inv) return std::nullopt;
        return multiply(*a, *inv);
      }
      return multiply(*a, Poly{invert(d[0])});
    }
    case K::Power:
      return normalize_power(e, budget);
    case K::Floor:
      return Poly{Term{BigRational(floor_expr(e.arg(), budget)), {}}};
  }
  return std::nullopt;
}

/// Exact value when the expression simplifies to a rational constant.
inline std::optional<BigRational> as_rational(const RealExpr& e, const PrecisionBudget& budget) {
  if (e.is_rational()) return e.rational_value();
  auto p = normalize(e, budget);
  if (!p) return std::nullopt;
  Poly s = simplify(*p);
  if (s.empty()) return BigRational(0);
  if (s.size() == 1 && s[0].powers.empty() && s[0].atoms.empty()) return s[0].coeff;
  return std::nullopt;
}

/// Sign of the expression when symbolic simplification decides it.
inline std::optional<int> symbolic_sign(const RealExpr& e, const PrecisionBudget& budget) {
  auto p = normalize(e, budget);
  if (!p) return std::nullopt;
  Poly s = simplify(*p);
  if (s.empty()) return 0;
  bool all_pos = true, all_neg = true;
  for (const auto& t : s) {
    if (t.coeff > 0) all_neg = false;
    if (t.coeff < 0) all_pos = false;
  }
  if (all_pos) return 1;
  if (all_neg) return -1;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Interval evaluation with outward rounding to `w` significant bits.
// ---------------------------------------------------------------------------

/// Raised when an evaluation at the current working precision cannot decide
/// a branch (a divisor or root argument whose interval straddles zero).
struct NeedMorePrecision {};

struct Interval {
  BigRational lo;
  BigRational hi;
};

inline BigRational round_dyadic(const BigRational& q, long w, bool up) {
  if (q == 0) return q;
  long shift = w - approx_log2(q);
  BigRational scaled = ldexp(q, shift);
  if (is_integer(scaled)) return q;
  BigInt r = up ? ceil_of(scaled) : floor_of(scaled);
  return ldexp(BigRational(r), -shift);
}

inline Interval rounded(const BigRational& lo, const BigRational& hi, long w) {
  return Interval{round_dyadic(lo, w, false), round_dyadic(hi, w, true)};
}

inline Interval mul(const Interval& a, const Interval& b, long w) {
  BigRational p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  BigRational lo = p[0], hi = p[0];
  for (const auto& x : p) {
    if (x < lo) lo = x;
    if (x > hi) hi = x;
  }
  return rounded(lo, hi, w);
}

inline Interval reciprocal(const Interval& a, long w) {
  if (a.lo == 0 && a.hi == 0) throw DomainError("division by zero");
  if (a.lo <= 0 && a.hi >= 0) throw NeedMorePrecision{};
  return rounded(BigRational(1) / a.hi, BigRational(1) / a.lo, w);
}

inline Interval pow_interval(const Interval& a, long n, long w) {
  if (n == 0) return Interval{1, 1};
  if (n < 0) return reciprocal(pow_interval(a, -n, w), w);
  BigRational l = pow_int(a.lo, n), h = pow_int(a.hi, n);
  if (n % 2 == 1 || a.lo >= 0) return rounded(l, h, w);
  if (a.hi <= 0) return rounded(h, l, w);
  return rounded(0, l > h ? l : h, w);
}

inline BigRational root_bound(const BigRational& x, unsigned long k, long w, bool up) {
  if (x == 0) return x;
  long shift = w - approx_log2(x) / static_cast<long>(k);
  BigRational scaled = ldexp(x, shift * static_cast<long>(k));
  BigInt n = up ? ceil_of(scaled) : floor_of(scaled);
  BigInt r = up ? ceil_root(n, k) : floor_root(n, k);
  return ldexp(BigRational(r), -shift);
}

inline Interval evaluate(const RealExpr& e, long w, const PrecisionBudget& budget);

inline Interval evaluate_power(const RealExpr& e, long w, const PrecisionBudget& budget) {
  const BigRational& ex = e.exponent();
  Interval base = evaluate(e.arg(), w, budget);
  if (is_integer(ex)) {
    if (!ex.get_num().fits_slong_p()) throw ResourceLimit("integer exponent too large");
    return pow_interval(base, ex.get_num().get_si(), w);
  }
  if (base.hi < 0) throw DomainError("fractional power of a negative quantity");
  if (base.lo < 0) {
    auto sign = symbolic_sign(e.arg(), budget);
    if (sign && *sign < 0) throw DomainError("fractional power of a negative quantity");
    if (sign && *sign == 0) {
      if (ex < 0) throw DomainError("zero raised to a negative power");
      return Interval{0, 0};
    }
    if (!sign) throw NeedMorePrecision{};
    base.lo = 0;
  }
  BigInt p = ex.get_num();
  unsigned long q = ex.get_den().get_ui();
  if (!p.fits_slong_p()) throw ResourceLimit("exponent too large");
  long pn = p.get_si();
  Interval raised = pow_interval(base, pn < 0 ? -pn : pn, w);
  Interval r{root_bound(raised.lo, q, w, false), root_bound(raised.hi, q, w, true)};
  return pn < 0 ? reciprocal(r, w) : r;
}

inline Interval evaluate(const RealExpr& e, long w, const PrecisionBudget& budget) {
  using K = RealExpr::Kind;
  switch (e.kind()) {
    case K::Rational:
      return rounded(e.rational_value(), e.rational_value(), w);
    case K::Sum: {
      Interval a = evaluate(e.lhs(), w, budget), b = evaluate(e.rhs(), w, budget);
      return rounded(a.lo + b.lo, a.hi + b.hi, w);
    }
    case K::Difference: {
      Interval a = evaluate(e.lhs(), w, budget), b = evaluate(e.rhs(), w, budget);
      return rounded(a.lo - b.hi, a.hi - b.lo, w);
    }
    case K::Product:
      return mul(evaluate(e.lhs(), w, budget), evaluate(e.rhs(), w, budget), w);
    case K::Quotient: {
      Interval a = evaluate(e.lhs(), w, budget);
      Interval b = evaluate(e.rhs(), w, budget);
      if (b.lo <= 0 && b.hi >= 0) {
        auto sign = symbolic_sign(e.rhs(), budget);
        if (sign && *sign == 0) throw DomainError("division by an expression equal to zero");
        throw NeedMorePrecision{};
      }
      return mul(a, reciprocal(b, w), w);
    }
    case K::Power:
      return evaluate_power(e, w, budget);
    case K::Floor: {
      Interval a = evaluate(e.arg(), w, budget);
      BigInt fl = floor_of(a.lo), fh = floor_of(a.hi);
      if (fl == fh) return Interval{BigRational(fl), BigRational(fl)};
      if (auto q = as_rational(e.arg(), budget)) {
        BigRational f(floor_of(*q));
        return Interval{f, f};
      }
      throw NeedMorePrecision{};
    }
  }
  throw InvalidInput("unknown expression node");
}

inline bool narrow_enough(const Interval& iv, unsigned long bits) {
  BigRational scale = 1;
  if (iv.lo > 0 && iv.lo > 1) scale = iv.lo;
  if (iv.hi < 0 && -iv.hi > 1) scale = -iv.hi;
  return iv.hi - iv.lo <= ldexp(scale, -static_cast<long>(bits));
}

inline std::optional<int> interval_sign(const RealExpr& e, const PrecisionBudget& budget) {
  for (long w = 64; w <= std::min<long>(1024, static_cast<long>(budget.max_bits)); w *= 2) {
    try {
      Interval iv = evaluate(e, w, budget);
      if (iv.lo > 0) return 1;
      if (iv.hi < 0) return -1;
    } catch (const NeedMorePrecision&) {
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Interval containing the value of `expr` with width at most
/// 2^-bits * max(1, |value|).
inline IntervalApprox eval_interval(const RealExpr& expr, unsigned long bits,
                                    const PrecisionBudget& budget = PrecisionBudget{}) {
  if (bits == 0) throw InvalidInput("bits must be positive");
  const long cap = static_cast<long>(std::max<unsigned long>(16 * bits, 4 * budget.max_bits));
  for (long w = static_cast<long>(bits) + 32; w <= cap; w *= 2) {
    try {
      detail::Interval iv = detail::evaluate(expr, w, budget);
      if (detail::narrow_enough(iv, bits)) return IntervalApprox{iv.lo, iv.hi, bits};
    } catch (const detail::NeedMorePrecision&) {
    }
  }
  throw PrecisionExhausted("could not evaluate expression to " + std::to_string(bits) + " bits");
}

/// Exact comparison of two real expressions. Equal is only ever reported
/// after symbolic simplification proves it.
inline Ordering compare(const RealExpr& a, const RealExpr& b, const PrecisionBudget& budget = PrecisionBudget{}) {
  if (a.is_rational() && b.is_rational()) {
    int c = cmp(a.rational_value(), b.rational_value());
    return c < 0 ? Ordering::Less : (c > 0 ? Ordering::Greater : Ordering::Equal);
  }
  if (a.identical(b)) return Ordering::Equal;
  if (auto s = detail::symbolic_sign(a - b, budget)) {
    return *s < 0 ? Ordering::Less : (*s > 0 ? Ordering::Greater : Ordering::Equal);
  }
  for (long w = 64; w <= static_cast<long>(budget.max_bits); w *= 2) {
    try {
      detail::Interval ia = detail::evaluate(a, w, budget);
      detail::Interval ib = detail::evaluate(b, w, budget);
      if (ia.hi < ib.lo) return Ordering::Less;
      if (ia.lo > ib.hi) return Ordering::Greater;
    } catch (const detail::NeedMorePrecision&) {
    }
  }
  throw PrecisionExhausted("comparison undecided at " + std::to_string(budget.max_bits) + " bits");
}

inline bool less(const RealExpr& a, const RealExpr& b, const PrecisionBudget& budget = PrecisionBudget{}) {
  return compare(a, b, budget) == Ordering::Less;
}
inline bool less_equal(const RealExpr& a, const RealExpr& b, const PrecisionBudget& budget = PrecisionBudget{}) {
  return compare(a, b, budget) != Ordering::Greater;
}
inline bool equal(const RealExpr& a, const RealExpr& b, const PrecisionBudget& budget = PrecisionBudget{}) {
  return compare(a, b, budget) == Ordering::Equal;
}

inline BigInt floor_expr(const RealExpr& expr, const PrecisionBudget& budget) {
  if (expr.is_rational()) return floor_of(expr.rational_value());
  if (auto q = detail::as_rational(expr, budget)) return floor_of(*q);
  for (long w = 64; w <= static_cast<long>(budget.max_bits); w *= 2) {
    try {
      detail::Interval iv = detail::evaluate(expr, w, budget);
      BigInt lo = floor_of(iv.lo), hi = floor_of(iv.hi);
      if (lo == hi) return lo;
    } catch (const detail::NeedMorePrecision&) {
    }
  }
  throw PrecisionExhausted("floor undecided at " + std::to_string(budget.max_bits) + " bits");
}

/// Nearest double, for display only.
inline double approximate(const RealExpr& expr) {
  IntervalApprox iv = eval_interval(expr, 60);
  BigRational mid = (iv.lo + iv.hi) / 2;
  return mid.get_d();
}

}  // namespace symcap
