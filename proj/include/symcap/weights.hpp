#pragma once

#include <string>
#include <vector>

#include "symcap/errors.hpp"
#include "symcap/rational.hpp"

namespace symcap {

/// [l_0; l_1, ..., l_K] with l_i >= 1 for i >= 1.
struct ContinuedFraction {
  std::vector<BigInt> terms;

  BigRational value() const {
    if (terms.empty()) throw InvalidInput("empty continued fraction");
    BigRational acc(terms.back());
    for (auto it = terms.rbegin() + 1; it != terms.rend(); ++it) acc = BigRational(*it) + BigRational(1) / acc;
    return acc;
  }

  std::string to_string() const {
    std::string out = "[";
    for (std::size_t i = 0; i < terms.size(); ++i) {
      out += terms[i].get_str();
      if (i + 1 < terms.size()) out += i == 0 ? "; " : ", ";
    }
    return out + "]";
  }
};

/// f/e = [l_0; l_1, ..., l_K] by Euclidean quotients, for 0 < e <= f.
inline ContinuedFraction continued_fraction(const BigInt& e, const BigInt& f) {
  if (e <= 0 || f <= 0) throw InvalidInput("continued_fraction needs positive integers");
  if (e > f) throw InvalidInput("continued_fraction needs e <= f");
  ContinuedFraction cf;
  BigInt prev = f, cur = e;
  while (cur != 0) {
    BigInt q = prev / cur;
    BigInt r = prev - q * cur;
    cf.terms.push_back(q);
    prev = cur;
    cur = r;
  }
  return cf;
}

struct WeightEntry {
  BigRational weight;
  BigInt multiplicity;

  bool operator==(const WeightEntry&) const = default;
};

/// W(e, f) = (X_0^{x l_0}, ..., X_K^{x l_K}) with strictly decreasing X_i.
struct WeightExpansion {
  std::vector<WeightEntry> entries;

  BigInt count() const {
    BigInt n = 0;
    for (const auto& w : entries) n += w.multiplicity;
    return n;
  }
  BigRational sum() const {
    BigRational s = 0;
    for (const auto& w : entries) s += w.weight * BigRational(w.multiplicity);
    return s;
  }
  BigRational sum_of_squares() const {
    BigRational s = 0;
    for (const auto& w : entries) s += w.weight * w.weight * BigRational(w.multiplicity);
    return s;
  }
  WeightExpansion scaled(const BigRational& t) const {
    WeightExpansion out = *this;
    for (auto& w : out.entries) w.weight *= t;
    return out;
  }
  bool operator==(const WeightExpansion&) const = default;
};

/// X_{-1} = f, X_0 = e, X_{i+1} = X_{i-1} - l_i X_i, multiplicities from the
/// continued fraction of f/e. The recursion stops at X_{K+1} = 0.
inline WeightExpansion weight_expansion(const BigInt& e, const BigInt& f) {
  ContinuedFraction cf = continued_fraction(e, f);
  WeightExpansion w;
  BigInt prev = f, cur = e;
  for (const auto& l : cf.terms) {
    w.entries.push_back(WeightEntry{BigRational(cur), l});
    BigInt next = prev - l * cur;
    prev = cur;
    cur = next;
  }
  if (cur != 0) throw VerificationFailed("weight recursion did not terminate at zero");
  return w;
}

/// Rational arguments: clear denominators, expand, scale back.
inline WeightExpansion weight_expansion(const BigRational& e, const BigRational& f) {
  if (e <= 0 || f <= 0) throw InvalidInput("weight_expansion needs positive arguments");
  BigInt l = lcm(e.get_den(), f.get_den());
  BigRational ei = e * BigRational(l), fi = f * BigRational(l);
  return weight_expansion(BigInt(ei.get_num()), BigInt(fi.get_num())).scaled(make_rational(1, l));
}

/// Disjoint balls of capacities `balls` (with multiplicity) into B(target).
struct BallPackingProblem {
  BigRational target;
  std::vector<WeightEntry> balls;

  BigInt ball_count() const {
    BigInt n = 0;
    for (const auto& b : balls) n += b.multiplicity;
    return n;
  }

  void validate() const {
    if (target <= 0) throw InvalidInput("target capacity must be positive");
    if (balls.empty()) throw InvalidInput("a packing problem needs at least one ball");
    for (const auto& b : balls) {
      if (b.weight <= 0) throw InvalidInput("ball capacities must be positive");
      if (b.multiplicity <= 0) throw InvalidInput("ball multiplicities must be positive");
    }
  }

  /// Balls listed one per slot, in order; for small problems only.
  std::vector<BigRational> expanded() const {
    std::vector<BigRational> out;
    for (const auto& b : balls)
      for (BigInt i = 0; i < b.multiplicity; ++i) out.push_back(b.weight);
    return out;
  }
};

/// E(e, f) -> E(c, d) is equivalent to packing W(e, f) and W(d - c, d) into
/// B(d); the second family is empty when c = d.
inline BallPackingProblem ellipsoid_to_ball_problem(const BigInt& e, const BigInt& f, const BigInt& c, const BigInt& d) {
  if (e <= 0 || f <= 0 || c <= 0 || d <= 0) throw InvalidInput("ellipsoid_to_ball_problem needs positive integers");
  if (e > f || c > d) throw InvalidInput("ellipsoid_to_ball_problem needs e <= f and c <= d");
  BallPackingProblem p{BigRational(d), weight_expansion(e, f).entries};
  if (c != d)
    for (auto& w : weight_expansion(BigInt(d - c), d).entries) p.balls.push_back(std::move(w));
  return p;
}

/// Number of balls ellipsoid_to_ball_problem would produce, without building it.
inline BigInt ball_problem_size(const BigInt& e, const BigInt& f, const BigInt& c, const BigInt& d) {
  BigInt n = 0;
  for (const auto& l : continued_fraction(e, f).terms) n += l;
  if (c != d)
    for (const auto& l : continued_fraction(BigInt(d - c), d).terms) n += l;
  return n;
}

}  // namespace symcap
