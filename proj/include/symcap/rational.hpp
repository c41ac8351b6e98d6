#pragma once

#include <gmpxx.h>

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>

#include "symcap/errors.hpp"

namespace symcap {

using BigInt = mpz_class;
/// Canonical rational: gcd(|num|, den) = 1 and den > 0. Every constructor
/// path in this library goes through `make_rational` or GMP arithmetic,
/// both of which keep the invariant.
using BigRational = mpq_class;

inline BigRational make_rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw InvalidInput("zero denominator");
  BigRational q(num, den);
  q.canonicalize();
  return q;
}

inline bool is_integer(const BigRational& q) { return q.get_den() == 1; }

inline BigInt floor_of(const BigRational& q) {
  BigInt r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

inline BigInt ceil_of(const BigRational& q) {
  BigInt r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

inline BigInt pow_int(const BigInt& base, unsigned long e) {
  BigInt r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

/// base^e for any integer e; throws DomainError for 0^negative.
inline BigRational pow_int(const BigRational& base, long e) {
  if (e < 0) {
    if (base == 0) throw DomainError("zero raised to a negative power");
    return pow_int(BigRational(1) / base, -e);
  }
  auto ue = static_cast<unsigned long>(e);
  return make_rational(pow_int(BigInt(base.get_num()), ue), pow_int(BigInt(base.get_den()), ue));
}

/// q * 2^shift, exact.
inline BigRational ldexp(const BigRational& q, long shift) {
  BigRational r;
  if (shift >= 0)
    mpq_mul_2exp(r.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(shift));
  else
    mpq_div_2exp(r.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(-shift));
  return r;
}

inline BigInt lcm(const BigInt& a, const BigInt& b) {
  BigInt r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline BigInt gcd(const BigInt& a, const BigInt& b) {
  BigInt r;
  mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

/// floor(log2 |q|) up to an error of one; used only to pick working scales.
inline long approx_log2(const BigRational& q) {
  if (q == 0) return 0;
  auto nb = static_cast<long>(mpz_sizeinbase(q.get_num_mpz_t(), 2));
  auto db = static_cast<long>(mpz_sizeinbase(q.get_den_mpz_t(), 2));
  return nb - db;
}

/// floor(x^(1/k)) for x >= 0.
inline BigInt floor_root(const BigInt& x, unsigned long k) {
  BigInt r;
  mpz_root(r.get_mpz_t(), x.get_mpz_t(), k);
  return r;
}

/// ceil(x^(1/k)) for x >= 0.
inline BigInt ceil_root(const BigInt& x, unsigned long k) {
  BigInt r;
  int exact = mpz_root(r.get_mpz_t(), x.get_mpz_t(), k);
  if (!exact) r += 1;
  return r;
}

inline std::string to_string(const BigInt& z) { return z.get_str(); }

/// "p" for integers, "p/q" otherwise.
inline std::string to_string(const BigRational& q) { return q.get_str(); }

/// Parses "p", "-p" or "p/q" (decimal digits only). Floating-point text is
/// rejected so exactness is preserved end to end.
inline BigRational parse_rational(std::string_view text) {
  auto valid_int = [](std::string_view s, bool allow_sign) {
    if (s.empty()) return false;
    std::size_t i = 0;
    if (allow_sign && (s[0] == '-' || s[0] == '+')) i = 1;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
  };
  auto slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!valid_int(num, true) || !valid_int(den, false))
    throw InvalidInput("not a rational literal: '" + std::string(text) + "'");
  std::string n(num);
  if (!n.empty() && n[0] == '+') n.erase(0, 1);
  return make_rational(BigInt(n), BigInt(std::string(den)));
}

inline BigInt parse_integer(std::string_view text) {
  BigRational q = parse_rational(text);
  if (!is_integer(q)) throw InvalidInput("not an integer: '" + std::string(text) + "'");
  return q.get_num();
}

/// Converts to a machine integer, throwing when it does not fit.
inline std::int64_t to_int64(const BigInt& z) {
  if (!z.fits_slong_p()) throw ResourceLimit("integer too large for machine word: " + z.get_str());
  return z.get_si();
}

}  // namespace symcap
