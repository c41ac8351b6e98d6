#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "symcap/ellipsoid.hpp"
#include "symcap/errors.hpp"
#include "symcap/exact.hpp"
#include "symcap/expr_io.hpp"
#include "symcap/packing.hpp"
#include "symcap/weights.hpp"

namespace symcap {

/// Axes after a step, in the order the next step addresses them.
using AxisTuple = std::vector<RealExpr>;

struct EmbeddingCertificate;
using CertificatePtr = std::shared_ptr<const EmbeddingCertificate>;

namespace rules {

/// Axis-wise enlargement.
struct Inclusion {};

/// post[i] = pre[perm[i]]
struct Permute {
  std::vector<std::size_t> perm;
};

/// E(t x) -> E(t y) from a certificate for E(x) -> E(y).
struct Rescale {
  RealExpr t;
  CertificatePtr inner;
};

/// Runs `inner` on the first m axes and carries the rest along.
struct Suspend {
  std::size_t m = 0;
  CertificatePtr inner;
};

/// E(x, x b) -> B(x sqrt(b)) when b = 4 or b >= 289/36.
struct AxiomMSsqrt {
  RealExpr b;
};

/// E(x, x b) -> B(2 x) when 2 <= b <= 4.
struct AxiomMSg2 {
  RealExpr b;
};

/// E(a_1, ..., a_n) -> B(a_n) when a_n <= 2 a_1.
struct AxiomTwoA1 {};

/// E(x, x b) -> E(x lambda sqrt(b), x sqrt(b) / lambda) when b >= 9 and
/// 2/3 <= lambda^2 <= 1.
struct AxiomLambda35 {
  RealExpr lambda;
  RealExpr b;
};

/// E(s e, s f) -> E(s c, s d), checked by ball packing.
struct BallPack4D {
  BigInt e, f, c, d;
};

}  // namespace rules

using StepRule = std::variant<rules::Inclusion, rules::Permute, rules::Rescale, rules::Suspend, rules::AxiomMSsqrt,
                              rules::AxiomMSg2, rules::AxiomTwoA1, rules::AxiomLambda35, rules::BallPack4D>;

inline const char* rule_name(const StepRule& r) {
  static constexpr const char* names[] = {"Inclusion", "Permute",     "Rescale",       "Suspend",   "AxiomMSsqrt",
                                          "AxiomMSg2", "AxiomTwoA1", "AxiomLambda35", "BallPack4D"};
  return names[r.index()];
}

struct EmbeddingStep {
  StepRule rule;
  AxisTuple result;
};

struct EmbeddingCertificate {
  Ellipsoid source;
  Ellipsoid target;
  std::vector<EmbeddingStep> steps;
};

struct VerificationResult {
  bool valid = true;
  /// 1-based index of the first failing step; 0 for chain-level failures.
  std::size_t step = 0;
  std::string reason;

  explicit operator bool() const { return valid; }

  std::string to_string() const {
    if (valid) return "Valid";
    if (step == 0) return "Invalid: " + reason;
    return "Invalid at step " + std::to_string(step) + ": " + reason;
  }
};

namespace detail {

struct StepFailure {
  std::string reason;
};

inline bool tuples_equal(const AxisTuple& a, const AxisTuple& b, const PrecisionBudget& budget) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (compare(a[i], b[i], budget) != Ordering::Equal) return false;
  return true;
}

inline AxisTuple sorted_tuple(AxisTuple t, const PrecisionBudget& budget) {
  std::stable_sort(t.begin(), t.end(),
                   [&](const RealExpr& x, const RealExpr& y) { return compare(x, y, budget) == Ordering::Less; });
  return t;
}

inline bool same_multiset(const AxisTuple& a, const AxisTuple& b, const PrecisionBudget& budget) {
  return a.size() == b.size() && tuples_equal(sorted_tuple(a, budget), sorted_tuple(b, budget), budget);
}

inline std::string tuple_string(const AxisTuple& t) { return "(" + format_list(t) + ")"; }

inline RealExpr product(const AxisTuple& t) {
  RealExpr p = t.front();
  for (std::size_t i = 1; i < t.size(); ++i) p = p * t[i];
  return p;
}

inline void require(bool ok, const std::string& reason) {
  if (!ok) throw StepFailure{reason};
}

inline void require_two(const AxisTuple& pre, const char* rule) {
  require(pre.size() == 2, std::string(rule) + " applies to 4-dimensional ellipsoids only");
}

inline void require_result(const AxisTuple& expected, const AxisTuple& post, const PrecisionBudget& budget) {
  require(tuples_equal(expected, post, budget),
          "stated result " + tuple_string(post) + " differs from " + tuple_string(expected));
}

/// For the 4-dimensional axioms: pre = (x, x b).
inline RealExpr scale_for(const AxisTuple& pre, const RealExpr& b, const PrecisionBudget& budget) {
  require(compare(pre[1], pre[0] * b, budget) == Ordering::Equal,
          "axes " + tuple_string(pre) + " are not of the form (x, x b) with b = " + format(b));
  return pre[0];
}

}  // namespace detail

inline VerificationResult verify_certificate(const EmbeddingCertificate& c, const PrecisionBudget& budget = PrecisionBudget{});

namespace detail {

inline void check_inner(const CertificatePtr& inner, const PrecisionBudget& budget) {
  require(inner != nullptr, "missing inner certificate");
  VerificationResult r = verify_certificate(*inner, budget);
  require(r.valid, "inner certificate " + r.to_string());
}

inline void check_step(const StepRule& rule, const AxisTuple& pre, const AxisTuple& post, const PrecisionBudget& budget) {
  using namespace rules;
  require(!post.empty(), "empty result");
  for (const auto& v : post) require(compare(v, RealExpr(0), budget) == Ordering::Greater, "non-positive axis " + format(v));

  if (std::holds_alternative<Inclusion>(rule)) {
    require(post.size() == pre.size(), "inclusion changes the dimension");
    for (std::size_t i = 0; i < pre.size(); ++i)
      require(compare(pre[i], post[i], budget) != Ordering::Greater,
              "inclusion shrinks axis " + std::to_string(i + 1) + " from " + format(pre[i]) + " to " + format(post[i]));
  } else if (auto* p = std::get_if<Permute>(&rule)) {
    std::vector<std::size_t> check = p->perm;
    std::sort(check.begin(), check.end());
    std::vector<std::size_t> iota(pre.size());
    std::iota(iota.begin(), iota.end(), 0);
    require(check == iota, "not a permutation of " + std::to_string(pre.size()) + " axes");
    AxisTuple expected;
    for (auto i : p->perm) expected.push_back(pre[i]);
    require_result(expected, post, budget);
  } else if (auto* r = std::get_if<Rescale>(&rule)) {
    require(compare(r->t, RealExpr(0), budget) == Ordering::Greater, "rescaling factor must be positive");
    check_inner(r->inner, budget);
    AxisTuple from, to;
    for (const auto& a : r->inner->source.axes()) from.push_back(r->t * a);
    for (const auto& a : r->inner->target.axes()) to.push_back(r->t * a);
    require(tuples_equal(pre, from, budget), "axes " + tuple_string(pre) + " are not t * " + r->inner->source.to_string());
    require(same_multiset(post, to, budget), "result " + tuple_string(post) + " is not t * " + r->inner->target.to_string());
  } else if (auto* s = std::get_if<Suspend>(&rule)) {
    require(s->m >= 1 && s->m <= pre.size(), "suspension size out of range");
    check_inner(s->inner, budget);
    require(s->inner->source.dimension() == s->m && s->inner->target.dimension() == s->m,
            "inner certificate has dimension " + std::to_string(s->inner->source.dimension()) + ", not " +
                std::to_string(s->m));
    require(post.size() == pre.size(), "suspension changes the dimension");
    AxisTuple head(pre.begin(), pre.begin() + static_cast<long>(s->m));
    require(tuples_equal(head, s->inner->source.axes(), budget),
            "first " + std::to_string(s->m) + " axes do not match " + s->inner->source.to_string());
    AxisTuple out_head(post.begin(), post.begin() + static_cast<long>(s->m));
    require(same_multiset(out_head, s->inner->target.axes(), budget),
            "suspended result does not match " + s->inner->target.to_string());
    for (std::size_t i = s->m; i < pre.size(); ++i)
      require(compare(pre[i], post[i], budget) == Ordering::Equal,
              "suspension alters carried axis " + std::to_string(i + 1));
  } else if (auto* a = std::get_if<AxiomMSsqrt>(&rule)) {
    require_two(pre, "AxiomMSsqrt");
    const RealExpr& b = a->b;
    bool ok = compare(b, RealExpr(4), budget) == Ordering::Equal ||
              compare(b, RealExpr(make_rational(289, 36)), budget) != Ordering::Less;
    require(ok, "hypothesis b = 4 or b >= 8 1/36 fails");
    RealExpr x = scale_for(pre, b, budget);
    RealExpr r = x * sqrt(b);
    require_result({r, r}, post, budget);
  } else if (auto* g = std::get_if<AxiomMSg2>(&rule)) {
    require_two(pre, "AxiomMSg2");
    require(compare(g->b, RealExpr(2), budget) != Ordering::Less && compare(g->b, RealExpr(4), budget) != Ordering::Greater,
            "hypothesis 2 <= b <= 4 fails");
    RealExpr x = scale_for(pre, g->b, budget);
    require_result({RealExpr(2) * x, RealExpr(2) * x}, post, budget);
  } else if (std::holds_alternative<AxiomTwoA1>(rule)) {
    AxisTuple s = sorted_tuple(pre, budget);
    require(compare(s.back(), RealExpr(2) * s.front(), budget) != Ordering::Greater, "hypothesis a_n <= 2 a_1 fails");
    require_result(AxisTuple(pre.size(), s.back()), post, budget);
  } else if (auto* l = std::get_if<AxiomLambda35>(&rule)) {
    require_two(pre, "AxiomLambda35");
    require(compare(l->b, RealExpr(9), budget) != Ordering::Less, "hypothesis b >= 9 fails");
    RealExpr sq = l->lambda * l->lambda;
    require(compare(sq, RealExpr(make_rational(2, 3)), budget) != Ordering::Less &&
                compare(sq, RealExpr(1), budget) != Ordering::Greater,
            "hypothesis 2/3 <= lambda^2 <= 1 fails");
    RealExpr x = scale_for(pre, l->b, budget);
    RealExpr rb = sqrt(l->b);
    require_result({x * l->lambda * rb, x * rb / l->lambda}, post, budget);
  } else if (auto* bp = std::get_if<BallPack4D>(&rule)) {
    require_two(pre, "BallPack4D");
    require(bp->e > 0 && bp->f > 0 && bp->c > 0 && bp->d > 0 && bp->e <= bp->f && bp->c <= bp->d,
            "ball packing parameters need 0 < e <= f and 0 < c <= d");
    RealExpr s = pre[0] / RealExpr(BigRational(bp->e));
    require(compare(pre[1], s * RealExpr(BigRational(bp->f)), budget) == Ordering::Equal,
            "axes " + tuple_string(pre) + " are not proportional to (" + bp->e.get_str() + ", " + bp->f.get_str() + ")");
    require_result({s * RealExpr(BigRational(bp->c)), s * RealExpr(BigRational(bp->d))}, post, budget);
    FeasibilityResult fr = feasible(ellipsoid_to_ball_problem(bp->e, bp->f, bp->c, bp->d));
    require(fr.feasible(), "ball packing for E(" + bp->e.get_str() + ", " + bp->f.get_str() + ") -> E(" +
                               bp->c.get_str() + ", " + bp->d.get_str() + ") fails: " + fr.describe());
  }
}

}  // namespace detail

/// Re-checks every step. Hypotheses are tested with `compare`, so the only
/// way to get Valid is for each inequality and equality to be proven.
inline VerificationResult verify_certificate(const EmbeddingCertificate& c, const PrecisionBudget& budget) {
  if (c.source.dimension() != c.target.dimension())
    return VerificationResult{false, 0, "source and target have different dimensions"};
  AxisTuple current = c.source.axes();
  for (std::size_t i = 0; i < c.steps.size(); ++i) {
    const auto& step = c.steps[i];
    try {
      detail::check_step(step.rule, current, step.result, budget);
      detail::require(step.result.size() == current.size(), "step changes the dimension");
      detail::require(compare(detail::product(current), detail::product(step.result), budget) != Ordering::Greater,
                      "axis product decreases");
    } catch (const detail::StepFailure& f) {
      return VerificationResult{false, i + 1, f.reason};
    } catch (const PrecisionExhausted& e) {
      throw PrecisionExhausted("at step " + std::to_string(i + 1) + ": " + e.what());
    }
    current = step.result;
  }
  if (!detail::same_multiset(current, c.target.axes(), budget))
    return VerificationResult{false, c.steps.size(),
                              "chain ends at " + detail::tuple_string(current) + ", not " + c.target.to_string()};
  return VerificationResult{};
}

/// Multiplies source, target and every intermediate result by t.
inline EmbeddingCertificate scale_certificate(const EmbeddingCertificate& c, const RealExpr& t) {
  EmbeddingCertificate out{c.source.scaled(t), c.target.scaled(t), {}};
  for (const auto& step : c.steps) {
    EmbeddingStep s = step;
    for (auto& v : s.result) v = t * v;
    if (auto* r = std::get_if<rules::Rescale>(&s.rule)) r->t = t * r->t;
    if (auto* su = std::get_if<rules::Suspend>(&s.rule))
      su->inner = std::make_shared<const EmbeddingCertificate>(scale_certificate(*su->inner, t));
    out.steps.push_back(std::move(s));
  }
  return out;
}

/// Appends steps to a chain starting at a given tuple.
class ChainBuilder {
 public:
  explicit ChainBuilder(AxisTuple start) : current_(std::move(start)), source_(current_) {}

  const AxisTuple& current() const { return current_; }

  ChainBuilder& step(StepRule rule, AxisTuple result) {
    current_ = result;
    steps_.push_back(EmbeddingStep{std::move(rule), std::move(result)});
    return *this;
  }

  ChainBuilder& permute(std::vector<std::size_t> perm) {
    AxisTuple next;
    for (auto i : perm) next.push_back(current_.at(i));
    return step(rules::Permute{std::move(perm)}, std::move(next));
  }

  ChainBuilder& suspend(const EmbeddingCertificate& inner, const AxisTuple& inner_result) {
    std::size_t m = inner.source.dimension();
    AxisTuple next = inner_result;
    for (std::size_t i = m; i < current_.size(); ++i) next.push_back(current_[i]);
    return step(rules::Suspend{m, std::make_shared<const EmbeddingCertificate>(inner)}, std::move(next));
  }

  ChainBuilder& include(AxisTuple result) { return step(rules::Inclusion{}, std::move(result)); }

  EmbeddingCertificate finish(const Ellipsoid& target) const {
    return EmbeddingCertificate{Ellipsoid(source_), target, steps_};
  }

 private:
  AxisTuple current_;
  AxisTuple source_;
  std::vector<EmbeddingStep> steps_;
};

/// Result tuple of the last step, or the source axes for an empty chain.
inline AxisTuple final_axes(const EmbeddingCertificate& c) {
  return c.steps.empty() ? c.source.axes() : c.steps.back().result;
}

}  // namespace symcap
