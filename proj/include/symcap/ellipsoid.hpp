#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "symcap/errors.hpp"
#include "symcap/exact.hpp"
#include "symcap/expr_io.hpp"

namespace symcap {

/// E(a_1, ..., a_n): positive axes, kept sorted nondecreasing.
class Ellipsoid {
 public:
  explicit Ellipsoid(std::vector<RealExpr> axes, const PrecisionBudget& budget = PrecisionBudget{})
      : axes_(std::move(axes)) {
    if (axes_.empty()) throw InvalidInput("an ellipsoid needs at least one axis");
    for (const auto& a : axes_)
      if (compare(a, RealExpr(0), budget) != Ordering::Greater)
        throw InvalidInput("ellipsoid axes must be positive, got " + format(a));
    std::stable_sort(axes_.begin(), axes_.end(),
                     [&](const RealExpr& x, const RealExpr& y) { return compare(x, y, budget) == Ordering::Less; });
  }

  static Ellipsoid ball(const RealExpr& capacity, std::size_t n) {
    return Ellipsoid(std::vector<RealExpr>(n, capacity));
  }

  static Ellipsoid parse(std::string_view text) { return Ellipsoid(parse_expr_list(text)); }

  const std::vector<RealExpr>& axes() const { return axes_; }
  std::size_t dimension() const { return axes_.size(); }
  const RealExpr& operator[](std::size_t i) const { return axes_[i]; }

  Ellipsoid scaled(const RealExpr& t) const {
    std::vector<RealExpr> out;
    out.reserve(axes_.size());
    for (const auto& a : axes_) out.push_back(t * a);
    return Ellipsoid(std::move(out));
  }

  /// a_1 * ... * a_n
  RealExpr axis_product() const {
    RealExpr p = axes_.front();
    for (std::size_t i = 1; i < axes_.size(); ++i) p = p * axes_[i];
    return p;
  }

  bool all_rational() const {
    return std::all_of(axes_.begin(), axes_.end(), [](const RealExpr& a) { return a.is_rational(); });
  }

  std::string to_string() const { return "E(" + format_list(axes_) + ")"; }

 private:
  std::vector<RealExpr> axes_;
};

}  // namespace symcap
