#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "symcap/errors.hpp"
#include "symcap/real_expr.hpp"

namespace symcap {

// Text grammar for expressions:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | primary
//   primary := RATIONAL | '(' expr ')'
//            | 'root(' expr ',' INT ')' | 'pow(' expr ',' RATIONAL ')'
//            | 'floor(' expr ')'
//   RATIONAL := digits ['/' digits]      (no whitespace around the slash)
//
// `a/b` written without spaces between two integers is a rational literal;
// quotients of expressions are written with spaces, "a / b".

inline std::string format(const RealExpr& e) {
  using K = RealExpr::Kind;
  switch (e.kind()) {
    case K::Rational:
      return to_string(e.rational_value());
    case K::Sum:
      return "(" + format(e.lhs()) + " + " + format(e.rhs()) + ")";
    case K::Difference:
      return "(" + format(e.lhs()) + " - " + format(e.rhs()) + ")";
    case K::Product:
      return "(" + format(e.lhs()) + " * " + format(e.rhs()) + ")";
    case K::Quotient:
      return "(" + format(e.lhs()) + " / " + format(e.rhs()) + ")";
    case K::Power:
      if (e.exponent().get_num() == 1) return "root(" + format(e.arg()) + ", " + to_string(BigInt(e.exponent().get_den())) + ")";
      return "pow(" + format(e.arg()) + ", " + to_string(e.exponent()) + ")";
    case K::Floor:
      return "floor(" + format(e.arg()) + ")";
  }
  return "?";
}

namespace detail {

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : text_(text) {}

  RealExpr parse_all() {
    RealExpr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw InvalidInput("cannot parse expression '" + std::string(text_) + "' at offset " + std::to_string(pos_) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  bool at_digit() const { return pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])); }

  BigRational number() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < text_.size() && text_[pos_] == '-') ++pos_;
    if (!at_digit()) fail("expected a number");
    while (at_digit()) ++pos_;
    if (pos_ + 1 < text_.size() && text_[pos_] == '/' && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
      ++pos_;
      while (at_digit()) ++pos_;
    }
    return parse_rational(text_.substr(start, pos_ - start));
  }

  RealExpr expr() {
    RealExpr acc = term();
    for (;;) {
      if (accept('+'))
        acc = acc + term();
      else if (accept('-'))
        acc = acc - term();
      else
        return acc;
    }
  }

  RealExpr term() {
    RealExpr acc = unary();
    for (;;) {
      if (accept('*'))
        acc = acc * unary();
      else if (accept('/'))
        acc = acc / unary();
      else
        return acc;
    }
  }

  RealExpr unary() {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '-') {
      if (pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) return RealExpr(number());
      ++pos_;
      return RealExpr(0) - unary();
    }
    return primary();
  }

  bool keyword(std::string_view word) {
    skip_ws();
    if (text_.substr(pos_, word.size()) == word) {
      std::size_t after = pos_ + word.size();
      std::size_t k = after;
      while (k < text_.size() && std::isspace(static_cast<unsigned char>(text_[k]))) ++k;
      if (k < text_.size() && text_[k] == '(') {
        pos_ = k + 1;
        return true;
      }
    }
    return false;
  }

  RealExpr primary() {
    skip_ws();
    if (accept('(')) {
      RealExpr e = expr();
      expect(')');
      return e;
    }
    if (keyword("root")) {
      RealExpr x = expr();
      expect(',');
      BigRational k = number();
      expect(')');
      if (!is_integer(k) || k <= 0 || !k.get_num().fits_ulong_p()) fail("root index must be a positive integer");
      return root(x, k.get_num().get_ui());
    }
    if (keyword("pow")) {
      RealExpr x = expr();
      expect(',');
      BigRational p = number();
      expect(')');
      return pow(x, p);
    }
    if (keyword("floor")) {
      RealExpr x = expr();
      expect(')');
      return floor(x);
    }
    if (at_digit()) return RealExpr(number());
    fail("expected a number, '(' or a function");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline RealExpr parse_expr(std::string_view text) { return detail::ExprParser(text).parse_all(); }

/// Splits "1,3/2,root(5, 2)" on top-level commas and parses each entry.
inline std::vector<RealExpr> parse_expr_list(std::string_view text) {
  std::vector<RealExpr> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || (text[i] == ',' && depth == 0)) {
      out.push_back(parse_expr(text.substr(start, i - start)));
      start = i + 1;
    } else if (text[i] == '(') {
      ++depth;
    } else if (text[i] == ')') {
      --depth;
    }
  }
  return out;
}

inline std::string format_list(const std::vector<RealExpr>& values, std::string_view sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += format(values[i]);
  }
  return out;
}

}  // namespace symcap
