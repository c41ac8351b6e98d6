#pragma once

#include <algorithm>
#include <memory>
#include <utility>

#include "symcap/errors.hpp"
#include "symcap/rational.hpp"

namespace symcap {

/// Immutable expression tree over rationals with +, -, *, /, rational powers
/// and floor. Nodes are shared, never mutated, so copies are cheap and
/// values may be used from several threads at once.
///
/// Construction folds only the trivially exact cases (arithmetic on two
/// rational leaves, integer powers of rationals, floor of a rational, and
/// x^1). Folding is idempotent, so formatting and re-parsing a tree yields
/// a structurally identical tree.
class RealExpr {
 public:
  enum class Kind { Rational, Sum, Difference, Product, Quotient, Power, Floor };

  RealExpr() : RealExpr(BigRational(0)) {}
  RealExpr(BigRational value);                  // NOLINT(google-explicit-constructor)
  RealExpr(long value) : RealExpr(BigRational(value)) {}  // NOLINT(google-explicit-constructor)
  RealExpr(int value) : RealExpr(BigRational(value)) {}   // NOLINT(google-explicit-constructor)

  Kind kind() const;
  bool is_rational() const { return kind() == Kind::Rational; }
  const BigRational& rational_value() const;

  /// Operands of binary nodes.
  const RealExpr& lhs() const;
  const RealExpr& rhs() const;
  /// Base of a Power node, argument of a Floor node.
  const RealExpr& arg() const;
  /// Exponent of a Power node.
  const BigRational& exponent() const;

  std::size_t depth() const;

  /// Same tree shape and leaves.
  bool identical(const RealExpr& other) const;

  friend RealExpr operator+(const RealExpr& a, const RealExpr& b);
  friend RealExpr operator-(const RealExpr& a, const RealExpr& b);
  friend RealExpr operator*(const RealExpr& a, const RealExpr& b);
  friend RealExpr operator/(const RealExpr& a, const RealExpr& b);
  friend RealExpr operator-(const RealExpr& a) { return RealExpr(0) - a; }
  friend RealExpr pow(const RealExpr& base, const BigRational& exponent);
  friend RealExpr floor(const RealExpr& x);
  friend RealExpr root(const RealExpr& x, unsigned long k);

 private:
  struct Node;
  explicit RealExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static RealExpr make(Kind kind, RealExpr a, RealExpr b, BigRational value);
  static RealExpr null() { return RealExpr(std::shared_ptr<const Node>()); }

  std::shared_ptr<const Node> node_;
};

struct RealExpr::Node {
  Kind kind;
  BigRational value;  // leaf value or exponent
  RealExpr a;
  RealExpr b;
  std::size_t depth;
};

inline RealExpr::RealExpr(BigRational value) {
  auto n = std::make_shared<Node>(Node{Kind::Rational, std::move(value), null(), null(), 1});
  node_ = std::move(n);
}

inline RealExpr RealExpr::make(Kind kind, RealExpr a, RealExpr b, BigRational value) {
  std::size_t d = 1 + std::max(a.node_ ? a.depth() : 0, b.node_ ? b.depth() : 0);
  return RealExpr(std::make_shared<const Node>(Node{kind, std::move(value), std::move(a), std::move(b), d}));
}

inline RealExpr::Kind RealExpr::kind() const { return node_->kind; }

inline const BigRational& RealExpr::rational_value() const {
  if (kind() != Kind::Rational) throw InvalidInput("expression is not a rational leaf");
  return node_->value;
}

inline const RealExpr& RealExpr::lhs() const { return node_->a; }
inline const RealExpr& RealExpr::rhs() const { return node_->b; }
inline const RealExpr& RealExpr::arg() const { return node_->a; }
inline const BigRational& RealExpr::exponent() const { return node_->value; }
inline std::size_t RealExpr::depth() const { return node_->depth; }

inline bool RealExpr::identical(const RealExpr& other) const {
  if (node_ == other.node_) return true;
  if (kind() != other.kind()) return false;
  switch (kind()) {
    case Kind::Rational:
      return node_->value == other.node_->value;
    case Kind::Power:
      return node_->value == other.node_->value && arg().identical(other.arg());
    case Kind::Floor:
      return arg().identical(other.arg());
    default:
      return lhs().identical(other.lhs()) && rhs().identical(other.rhs());
  }
}

inline RealExpr operator+(const RealExpr& a, const RealExpr& b) {
  if (a.is_rational() && b.is_rational()) return RealExpr(BigRational(a.rational_value() + b.rational_value()));
  return RealExpr::make(RealExpr::Kind::Sum, a, b, 0);
}

inline RealExpr operator-(const RealExpr& a, const RealExpr& b) {
  if (a.is_rational() && b.is_rational()) return RealExpr(BigRational(a.rational_value() - b.rational_value()));
  return RealExpr::make(RealExpr::Kind::Difference, a, b, 0);
}

inline RealExpr operator*(const RealExpr& a, const RealExpr& b) {
  if (a.is_rational() && b.is_rational()) return RealExpr(BigRational(a.rational_value() * b.rational_value()));
  return RealExpr::make(RealExpr::Kind::Product, a, b, 0);
}

inline RealExpr operator/(const RealExpr& a, const RealExpr& b) {
  if (a.is_rational() && b.is_rational()) {
    if (b.rational_value() == 0) throw DomainError("division by zero");
    return RealExpr(BigRational(a.rational_value() / b.rational_value()));
  }
  return RealExpr::make(RealExpr::Kind::Quotient, a, b, 0);
}

inline RealExpr pow(const RealExpr& base, const BigRational& exponent) {
  if (exponent == 1) return base;
  if (base.is_rational() && is_integer(exponent) && exponent.get_num().fits_slong_p()) {
    const BigRational& q = base.rational_value();
    long e = exponent.get_num().get_si();
    if (e < 0 && q == 0) throw DomainError("zero raised to a negative power");
    return RealExpr(pow_int(q, e));
  }
  return RealExpr::make(RealExpr::Kind::Power, base, RealExpr::null(), exponent);
}

inline RealExpr root(const RealExpr& x, unsigned long k) {
  if (k == 0) throw InvalidInput("zeroth root");
  return pow(x, make_rational(1, k));
}

inline RealExpr sqrt(const RealExpr& x) { return root(x, 2); }

inline RealExpr floor(const RealExpr& x) {
  if (x.is_rational()) return RealExpr(BigRational(floor_of(x.rational_value())));
  return RealExpr::make(RealExpr::Kind::Floor, x, RealExpr::null(), 0);
}

}  // namespace symcap
