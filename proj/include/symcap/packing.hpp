#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "symcap/errors.hpp"
#include "symcap/rational.hpp"
#include "symcap/weights.hpp"

namespace symcap {

/// Homology class (d; m_1, ..., m_M) in the basis L, -E_1, ..., -E_M.
struct ClassVector {
  BigInt degree;
  std::vector<BigInt> mults;

  BigInt self_intersection() const {
    BigInt s = degree * degree;
    for (const auto& m : mults) s -= m * m;
    return s;
  }

  /// Pairing with the anticanonical class, 3d - sum m_i.
  BigInt anticanonical() const {
    BigInt s = 3 * degree;
    for (const auto& m : mults) s -= m;
    return s;
  }

  /// Multiplicities ordered by decreasing absolute value, so that the base
  /// class reads (0; -1, 0, ...).
  ClassVector canonical() const {
    ClassVector c = *this;
    std::stable_sort(c.mults.begin(), c.mults.end(), [](const BigInt& a, const BigInt& b) {
      BigInt aa = abs(a), bb = abs(b);
      if (aa != bb) return aa > bb;
      return a > b;
    });
    return c;
  }

  std::string to_string() const {
    std::string out = "(" + degree.get_str() + ";";
    for (std::size_t i = 0; i < mults.size(); ++i) out += (i ? "," : "") + mults[i].get_str();
    return out + ")";
  }

  bool operator==(const ClassVector&) const = default;
  bool operator<(const ClassVector& o) const {
    if (degree != o.degree) return degree < o.degree;
    return std::lexicographical_compare(o.mults.begin(), o.mults.end(), mults.begin(), mults.end());
  }
};

namespace detail {

/// Cremona move on three slots: (d; a, b, c) -> (d + t; a + t, b + t, c + t)
/// with t = d - a - b - c. Acts the same way on classes and on cohomology
/// vectors since it is a reflection of the Lorentzian form.
inline void cremona(BigInt& d, BigInt& a, BigInt& b, BigInt& c) {
  BigInt t = d - a - b - c;
  d += t;
  a += t;
  b += t;
  c += t;
}

}  // namespace detail

/// Transparent memo for is_exceptional, safe for concurrent lookups.
class ExceptionalCache {
 public:
  std::optional<bool> find(const ClassVector& v) const {
    std::shared_lock lock(mutex_);
    auto it = table_.find(key(v));
    if (it == table_.end()) return std::nullopt;
    return it->second;
  }
  void store(const ClassVector& v, bool value) {
    std::unique_lock lock(mutex_);
    table_.emplace(key(v), value);
  }
  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return table_.size();
  }

 private:
  static std::string key(const ClassVector& v) { return v.canonical().to_string(); }
  mutable std::shared_mutex mutex_;
  std::map<std::string, bool> table_;
};

/// True iff v satisfies d^2 - sum m^2 = -1, 3d - sum m = 1, and Cremona
/// reduction (sort descending, move on the three largest while the defect is
/// negative) reaches a single -1 entry with degree zero.
inline bool is_exceptional(const ClassVector& v, ExceptionalCache* cache = nullptr) {
  if (v.self_intersection() != -1 || v.anticanonical() != 1) return false;
  if (cache)
    if (auto hit = cache->find(v)) return *hit;
  BigInt d = v.degree;
  std::vector<BigInt> m = v.mults;
  while (m.size() < 3) m.push_back(0);
  bool result = false;
  for (;;) {
    std::sort(m.begin(), m.end(), std::greater<>());
    if (d == 0) {
      result = m.back() == -1 && std::all_of(m.begin(), m.end() - 1, [](const BigInt& x) { return x == 0; });
      break;
    }
    if (d < 0 || m.back() < 0) break;
    if (d - m[0] - m[1] - m[2] >= 0) break;
    detail::cremona(d, m[0], m[1], m[2]);
  }
  if (cache) cache->store(v, result);
  return result;
}

/// All exceptional classes with M slots and degree <= max_degree, one per
/// permutation orbit, in canonical form. Candidates are generated by a
/// bounded search over sorted multiplicities satisfying the two numerical
/// identities and then confirmed with is_exceptional.
inline std::vector<ClassVector> enumerate_exceptional(std::size_t M, long max_degree,
                                                      std::uint64_t node_budget = 50'000'000) {
  if (M == 0) throw InvalidInput("M must be positive");
  if (max_degree < 0) throw InvalidInput("max_degree must be nonnegative");
  std::vector<ClassVector> out;
  {
    ClassVector base{0, std::vector<BigInt>(M, 0)};
    base.mults[0] = -1;
    out.push_back(base);
  }
  std::uint64_t nodes = 0;
  std::vector<long> current(M, 0);
  std::function<void(std::size_t, long, long, long, long)> search = [&](std::size_t i, long cap, long sum_left,
                                                                        long sq_left, long d) {
    if (++nodes > node_budget) throw ResourceLimit("exceptional class search exceeded its node budget");
    long slots = static_cast<long>(M - i);
    if (slots == 0) {
      if (sum_left == 0 && sq_left == 0) {
        ClassVector c{d, {}};
        for (long x : current) c.mults.emplace_back(x);
        if (is_exceptional(c)) out.push_back(c);
      }
      return;
    }
    if (sum_left > slots * cap || sq_left > sum_left * cap) return;
    if (sq_left * slots < sum_left * sum_left) return;
    for (long m = std::min(cap, sum_left); m >= 0; --m) {
      if (m * m > sq_left) continue;
      current[i] = m;
      search(i + 1, m, sum_left - m, sq_left - m * m, d);
    }
    current[i] = 0;
  };
  for (long d = 1; d <= max_degree; ++d) search(0, d, 3 * d - 1, d * d + 1, d);
  std::sort(out.begin(), out.end());
  return out;
}

/// mu^2 versus sum w_i^2, both scaled to integers.
struct VolumeWitness {
  BigRational target_squared;
  BigRational sum_of_squares;
};

struct FeasibilityResult {
  enum class Status { Feasible, Infeasible };
  Status status = Status::Feasible;
  /// Exceptional class E with E . (mu; w) < 0, slots in problem order.
  std::optional<ClassVector> class_witness;
  std::optional<VolumeWitness> volume_witness;
  /// Set when the problem was too large to replay moves for an explicit
  /// class; the verdict is still exact.
  bool witness_truncated = false;
  std::uint64_t moves = 0;

  bool feasible() const { return status == Status::Feasible; }

  std::string describe() const {
    if (feasible()) return "Feasible";
    if (volume_witness)
      return "Infeasible: volume " + to_string(volume_witness->target_squared) + " < " +
             to_string(volume_witness->sum_of_squares);
    if (class_witness) return "Infeasible: witness " + class_witness->to_string();
    return "Infeasible: Cremona reduction produced a negative entry (witness omitted, problem too large)";
  }
};

struct PackingOptions {
  std::uint64_t move_budget = 100'000'000;
  std::uint64_t witness_slot_limit = 200'000;
};

namespace detail {

struct ScaledProblem {
  BigInt target;
  std::vector<std::pair<BigInt, BigInt>> balls;  // (weight, multiplicity), problem order
  BigInt slots;
};

inline ScaledProblem scale_to_integers(const BallPackingProblem& p) {
  BigInt l = p.target.get_den();
  for (const auto& b : p.balls) l = lcm(l, b.weight.get_den());
  ScaledProblem s;
  s.target = BigRational(p.target * BigRational(l)).get_num();
  s.slots = 0;
  for (const auto& b : p.balls) {
    s.balls.emplace_back(BigRational(b.weight * BigRational(l)).get_num(), b.multiplicity);
    s.slots += b.multiplicity;
  }
  return s;
}

/// Explicit replay of the reduction with slot identities, used only to build
/// a class witness once the verdict is known to be Infeasible.
inline ClassVector replay_witness(const ScaledProblem& s, std::uint64_t move_budget) {
  std::vector<BigInt> value;
  for (const auto& [w, mult] : s.balls)
    for (BigInt i = 0; i < mult; ++i) value.push_back(w);
  const std::size_t real_slots = value.size();
  while (value.size() < 3) value.push_back(0);
  auto order = [&](std::size_t a, std::size_t b) {
    if (value[a] != value[b]) return value[a] > value[b];
    return a < b;
  };
  std::set<std::size_t, decltype(order)> ranked(order);
  for (std::size_t i = 0; i < value.size(); ++i) ranked.insert(i);

  BigInt mu = s.target;
  std::vector<std::array<std::size_t, 3>> moves;
  ClassVector start{0, std::vector<BigInt>(value.size(), 0)};
  for (;;) {
    auto it = ranked.begin();
    std::array<std::size_t, 3> top{};
    for (auto& t : top) t = *it++;
    BigInt defect = mu - value[top[0]] - value[top[1]] - value[top[2]];
    if (defect >= 0) throw VerificationFailed("witness replay reached a reduced vector");
    for (auto t : top) ranked.erase(t);
    detail::cremona(mu, value[top[0]], value[top[1]], value[top[2]]);
    for (auto t : top) ranked.insert(t);
    moves.push_back(top);
    if (moves.size() > move_budget) throw ResourceLimit("Cremona reduction exceeded its move budget");
    auto lowest = *ranked.rbegin();
    if (value[lowest] < 0) {
      start.mults[lowest] = -1;
      break;
    }
    if (mu < 0) {
      auto first = ranked.begin();
      start.degree = 1;
      start.mults[*first] = 1;
      start.mults[*std::next(first)] = 1;
      break;
    }
  }
  ClassVector c = start;
  for (auto it = moves.rbegin(); it != moves.rend(); ++it)
    detail::cremona(c.degree, c.mults[(*it)[0]], c.mults[(*it)[1]], c.mults[(*it)[2]]);
  bool padded_zero = true;
  for (std::size_t i = real_slots; i < c.mults.size(); ++i) padded_zero = padded_zero && c.mults[i] == 0;
  if (padded_zero) c.mults.resize(real_slots);
  return c;
}

}  // namespace detail

/// Decides whether the balls pack into B(target) (closed convention: the
/// boundary counts as feasible). Conditions: mu^2 >= sum w_i^2, and Cremona
/// reduction of (mu; w sorted descending) ends at a vector with no negative
/// entry. Infeasible results carry a volume witness or an exceptional class
/// pairing negatively with (mu; w).
inline FeasibilityResult feasible(const BallPackingProblem& p, const PackingOptions& options = PackingOptions{}) {
  p.validate();
  detail::ScaledProblem s = detail::scale_to_integers(p);
  FeasibilityResult result;

  BigInt squares = 0;
  for (const auto& [w, mult] : s.balls) squares += w * w * mult;
  if (s.target * s.target < squares) {
    result.status = FeasibilityResult::Status::Infeasible;
    BigRational scale = BigRational(s.target) / p.target;
    BigRational scale2 = scale * scale;
    result.volume_witness = VolumeWitness{BigRational(s.target * s.target) / scale2, BigRational(squares) / scale2};
    return result;
  }

  std::map<BigInt, BigInt, std::greater<>> counts;
  for (const auto& [w, mult] : s.balls) counts[w] += mult;
  if (s.slots < 3) counts[0] += 3 - s.slots;

  BigInt mu = s.target;
  auto take_largest = [&]() {
    auto it = counts.begin();
    BigInt v = it->first;
    if (--it->second == 0) counts.erase(it);
    return v;
  };
  bool negative = false;
  for (;;) {
    BigInt a = take_largest(), b = take_largest(), c = take_largest();
    if (mu - a - b - c >= 0) break;
    detail::cremona(mu, a, b, c);
    if (++result.moves > options.move_budget) throw ResourceLimit("Cremona reduction exceeded its move budget");
    counts[a] += 1;
    counts[b] += 1;
    counts[c] += 1;
    if (a < 0 || b < 0 || c < 0 || mu < 0) {
      negative = true;
      break;
    }
  }
  if (!negative) return result;

  result.status = FeasibilityResult::Status::Infeasible;
  if (s.slots + 3 > BigInt(static_cast<unsigned long>(options.witness_slot_limit))) {
    result.witness_truncated = true;
    return result;
  }
  ClassVector w = detail::replay_witness(s, options.move_budget);
  BigInt pairing = w.degree * s.target;
  std::size_t slot = 0;
  for (const auto& [weight, mult] : s.balls)
    for (BigInt i = 0; i < mult; ++i, ++slot) pairing -= w.mults[slot] * weight;
  if (pairing >= 0 || !is_exceptional(w)) throw VerificationFailed("reconstructed witness " + w.to_string() + " is not valid");
  result.class_witness = std::move(w);
  return result;
}

struct PackingNumber {
  BigRational value;
  /// Class giving the binding constraint; empty when volume is binding.
  std::optional<ClassVector> binding_class;
};

/// p_k of the 4-ball: sup of k c^2 / mu^2 over c with k balls of capacity c
/// packing into B(mu). Every exceptional class (d; m) gives c <= d / sum m;
/// since sum m = 3d - 1, that ratio exceeds 1/3, so for k >= 9 volume is
/// always binding. For k <= 8 all exceptional classes have degree <= 6.
inline PackingNumber packing_number_detail(std::size_t k) {
  if (k == 0) throw InvalidInput("k must be positive");
  if (k > 1000) throw ResourceLimit("packing_number supports k <= 1000");
  long degree = k <= 8 ? 6 : 2;
  std::optional<BigRational> best;
  std::optional<ClassVector> best_class;
  for (const auto& c : enumerate_exceptional(k, degree)) {
    BigInt total = 0;
    for (const auto& m : c.mults) total += m;
    if (total <= 0) continue;
    BigRational ratio = make_rational(c.degree, total);
    if (!best || ratio < *best) {
      best = ratio;
      best_class = c;
    }
  }
  BigRational kk(static_cast<unsigned long>(k));
  if (!best || kk * *best * *best >= 1) return PackingNumber{1, std::nullopt};
  return PackingNumber{kk * *best * *best, best_class};
}

inline BigRational packing_number(std::size_t k) { return packing_number_detail(k).value; }

}  // namespace symcap
