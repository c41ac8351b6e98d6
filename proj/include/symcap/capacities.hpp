#pragma once

#include <cstddef>
#include <optional>
#include <queue>
#include <vector>

#include "symcap/ellipsoid.hpp"
#include "symcap/errors.hpp"
#include "symcap/exact.hpp"

namespace symcap {

/// c_1 <= c_2 <= ... (index k stored at position k - 1).
using CapacityList = std::vector<RealExpr>;

inline constexpr std::size_t kDefaultEhCount = 1000;

namespace detail {

inline std::vector<BigRational> ek_capacities_rational(const std::vector<RealExpr>& axes, std::size_t count) {
  struct Cursor {
    BigRational value;
    std::size_t axis;
    unsigned long multiple;
  };
  auto later = [](const Cursor& x, const Cursor& y) {
    int c = cmp(x.value, y.value);
    return c != 0 ? c > 0 : x.axis > y.axis;
  };
  std::priority_queue<Cursor, std::vector<Cursor>, decltype(later)> heap(later);
  for (std::size_t i = 0; i < axes.size(); ++i) heap.push(Cursor{axes[i].rational_value(), i, 1});
  std::vector<BigRational> out;
  out.reserve(count);
  while (out.size() < count) {
    Cursor c = heap.top();
    heap.pop();
    out.push_back(c.value);
    heap.push(Cursor{axes[c.axis].rational_value() * (c.multiple + 1), c.axis, c.multiple + 1});
  }
  return out;
}

}  // namespace detail

/// The `count` smallest elements, with multiplicity, of {j * a_i : j >= 1},
/// computed as an n-way ordered merge of the arithmetic progressions. Equal
/// values from different axes are all kept.
inline CapacityList ek_capacities(const Ellipsoid& e, std::size_t count, const PrecisionBudget& budget = PrecisionBudget{}) {
  if (count == 0) throw InvalidInput("count must be at least 1");
  CapacityList out;
  out.reserve(count);
  if (e.all_rational()) {
    for (auto& q : detail::ek_capacities_rational(e.axes(), count)) out.emplace_back(std::move(q));
    return out;
  }
  struct Cursor {
    RealExpr value;
    std::size_t axis;
    unsigned long multiple;
  };
  auto later = [&](const Cursor& x, const Cursor& y) {
    Ordering o = compare(x.value, y.value, budget);
    return o != Ordering::Equal ? o == Ordering::Greater : x.axis > y.axis;
  };
  std::priority_queue<Cursor, std::vector<Cursor>, decltype(later)> heap(later);
  for (std::size_t i = 0; i < e.dimension(); ++i) heap.push(Cursor{e[i], i, 1});
  while (out.size() < count) {
    Cursor c = heap.top();
    heap.pop();
    out.push_back(c.value);
    unsigned long next = c.multiple + 1;
    heap.push(Cursor{RealExpr(static_cast<long>(next)) * e[c.axis], c.axis, next});
  }
  return out;
}

/// Smallest k <= count with c_k(source) > c_k(target), if any.
inline std::optional<std::size_t> ek_obstruction(const Ellipsoid& source, const Ellipsoid& target, std::size_t count,
                                                 const PrecisionBudget& budget = PrecisionBudget{}) {
  if (source.dimension() != target.dimension()) throw InvalidInput("ellipsoids of different dimension");
  CapacityList cs = ek_capacities(source, count, budget);
  CapacityList ct = ek_capacities(target, count, budget);
  for (std::size_t k = 0; k < count; ++k)
    if (compare(cs[k], ct[k], budget) == Ordering::Greater) return k + 1;
  return std::nullopt;
}

enum class Verdict { Pass, Fail };

inline const char* to_string(Verdict v) { return v == Verdict::Pass ? "Pass" : "Fail"; }

/// Non-strict volume test a_1 ... a_n <= b_1 ... b_n.
inline Verdict volume_obstruction(const Ellipsoid& source, const Ellipsoid& target,
                                  const PrecisionBudget& budget = PrecisionBudget{}) {
  if (source.dimension() != target.dimension()) throw InvalidInput("ellipsoids of different dimension");
  return compare(source.axis_product(), target.axis_product(), budget) == Ordering::Greater ? Verdict::Fail
                                                                                            : Verdict::Pass;
}

struct BallLowerBound {
  RealExpr value;
  /// Capacity index realising the bound; empty when the volume bound wins.
  std::optional<std::size_t> eh_index;
};

/// (a_1 ... a_n)^(1/n), folded to a rational when it is one.
inline RealExpr volume_radius(const Ellipsoid& e, const PrecisionBudget& budget = PrecisionBudget{}) {
  RealExpr r = root(e.axis_product(), e.dimension());
  if (auto q = detail::as_rational(r, budget)) return RealExpr(*q);
  return r;
}

/// max((prod a_i)^(1/n), max_{k <= count} c_k(e) / ceil(k/n)), the best
/// lower bound on a ball capacity admitting `e` that volume and the first
/// `count` capacities certify. Ties prefer the capacity index.
inline BallLowerBound ball_lower_bound_detail(const Ellipsoid& e, std::size_t count = kDefaultEhCount,
                                              const PrecisionBudget& budget = PrecisionBudget{}) {
  if (count == 0) throw InvalidInput("count must be at least 1");
  const std::size_t n = e.dimension();
  CapacityList caps = ek_capacities(e, count, budget);
  RealExpr best_eh = caps[0];
  std::size_t best_k = 1;
  for (std::size_t k = 2; k <= count; ++k) {
    auto level = static_cast<long>((k + n - 1) / n);
    RealExpr candidate = caps[k - 1] / RealExpr(level);
    if (compare(candidate, best_eh, budget) == Ordering::Greater) {
      best_eh = candidate;
      best_k = k;
    }
  }
  RealExpr vol = volume_radius(e, budget);
  if (compare(vol, best_eh, budget) == Ordering::Greater) return BallLowerBound{vol, std::nullopt};
  return BallLowerBound{best_eh, best_k};
}

inline RealExpr ball_lower_bound(const Ellipsoid& e, std::size_t count = kDefaultEhCount,
                                 const PrecisionBudget& budget = PrecisionBudget{}) {
  return ball_lower_bound_detail(e, count, budget).value;
}

}  // namespace symcap
