#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "symcap/errors.hpp"
#include "symcap/rational.hpp"

namespace symcap {

using Point = std::vector<BigRational>;
using IntMatrix = std::vector<std::vector<BigInt>>;

namespace detail {

inline BigRational determinant(std::vector<std::vector<BigRational>> m) {
  const std::size_t n = m.size();
  BigRational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    while (pivot < n && m[pivot][c] == 0) ++pivot;
    if (pivot == n) return 0;
    if (pivot != c) {
      std::swap(m[pivot], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      if (m[r][c] == 0) continue;
      BigRational f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

inline BigInt determinant(const IntMatrix& m) {
  std::vector<std::vector<BigRational>> q;
  for (const auto& row : m) q.emplace_back(row.begin(), row.end());
  return BigRational(determinant(q)).get_num();
}

/// Generalized cross product: a vector orthogonal to the n-1 rows, zero iff
/// they are linearly dependent.
inline Point normal_of(const std::vector<Point>& rows, std::size_t n) {
  Point out(n);
  for (std::size_t skip = 0; skip < n; ++skip) {
    std::vector<std::vector<BigRational>> minor;
    for (const auto& r : rows) {
      std::vector<BigRational> row;
      for (std::size_t c = 0; c < n; ++c)
        if (c != skip) row.push_back(r[c]);
      minor.push_back(std::move(row));
    }
    BigRational d = n == 1 ? BigRational(1) : determinant(minor);
    out[skip] = (skip % 2 == 0) ? d : BigRational(-d);
  }
  return out;
}

inline BigRational dot(const Point& a, const Point& b) {
  BigRational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Point minus(const Point& a, const Point& b) {
  Point out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

inline bool is_zero(const Point& p) {
  return std::all_of(p.begin(), p.end(), [](const BigRational& x) { return x == 0; });
}

inline std::string point_string(const Point& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + to_string(p[i]);
  return s + ")";
}

}  // namespace detail

/// Convex hull of finitely many rational points. Every construction in this
/// header produces simplices (n + 1 vertices in R^n).
struct LatticePolytope {
  std::size_t dimension = 0;
  std::vector<Point> vertices;

  bool is_simplex() const { return vertices.size() == dimension + 1; }

  /// |det(v_i - v_0)| / n!, simplices only.
  BigRational volume() const {
    if (!is_simplex()) throw InvalidInput("volume is implemented for simplices only");
    std::vector<std::vector<BigRational>> m;
    for (std::size_t i = 1; i < vertices.size(); ++i) m.push_back(detail::minus(vertices[i], vertices[0]));
    BigRational v = abs(detail::determinant(m));
    for (std::size_t i = 2; i <= dimension; ++i) v /= BigRational(static_cast<unsigned long>(i));
    return v;
  }

  /// Same vertex set, in any order.
  bool same_vertices(const LatticePolytope& other) const {
    if (dimension != other.dimension || vertices.size() != other.vertices.size()) return false;
    auto a = vertices, b = other.vertices;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
  }

  /// Facets of a full-dimensional simplex as (normal, offset) with
  /// normal . x <= offset inside.
  std::vector<std::pair<Point, BigRational>> facets() const {
    std::vector<std::pair<Point, BigRational>> out;
    for (std::size_t omit = 0; omit < vertices.size(); ++omit) {
      std::vector<Point> rows;
      const Point* base = nullptr;
      for (std::size_t i = 0; i < vertices.size(); ++i) {
        if (i == omit) continue;
        if (!base)
          base = &vertices[i];
        else
          rows.push_back(detail::minus(vertices[i], *base));
      }
      Point nrm = detail::normal_of(rows, dimension);
      BigRational off = detail::dot(nrm, *base);
      if (detail::dot(nrm, vertices[omit]) > off) {
        for (auto& x : nrm) x = -x;
        off = -off;
      }
      out.emplace_back(std::move(nrm), std::move(off));
    }
    return out;
  }

  bool contains(const Point& p) const {
    for (const auto& [nrm, off] : facets())
      if (detail::dot(nrm, p) > off) return false;
    return true;
  }

  std::string to_string() const {
    std::string s = "hull{";
    for (std::size_t i = 0; i < vertices.size(); ++i) s += (i ? ", " : "") + detail::point_string(vertices[i]);
    return s + "}";
  }
};

/// x -> A x + t with integer A, |det A| = 1.
struct UnimodularAffineMap {
  IntMatrix linear;
  Point translation;

  static UnimodularAffineMap identity(std::size_t n) {
    UnimodularAffineMap m{IntMatrix(n, std::vector<BigInt>(n, 0)), Point(n, 0)};
    for (std::size_t i = 0; i < n; ++i) m.linear[i][i] = 1;
    return m;
  }

  std::size_t dimension() const { return linear.size(); }
  BigInt determinant() const { return detail::determinant(linear); }

  void validate() const {
    for (const auto& row : linear)
      if (row.size() != linear.size()) throw InvalidInput("affine map needs a square linear part");
    if (translation.size() != linear.size()) throw InvalidInput("translation has the wrong dimension");
    BigInt d = determinant();
    if (d != 1 && d != -1) throw InvalidInput("linear part has determinant " + d.get_str() + ", not +-1");
  }

  Point apply(const Point& x) const {
    Point y = translation;
    for (std::size_t i = 0; i < linear.size(); ++i)
      for (std::size_t j = 0; j < linear.size(); ++j) y[i] += BigRational(linear[i][j]) * x[j];
    return y;
  }

  LatticePolytope apply(const LatticePolytope& p) const {
    LatticePolytope out{p.dimension, {}};
    for (const auto& v : p.vertices) out.vertices.push_back(apply(v));
    return out;
  }

  /// (this o other)(x) = this(other(x)).
  UnimodularAffineMap compose(const UnimodularAffineMap& other) const {
    const std::size_t n = dimension();
    UnimodularAffineMap out{IntMatrix(n, std::vector<BigInt>(n, 0)), apply(other.translation)};
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) out.linear[i][j] += linear[i][k] * other.linear[k][j];
    return out;
  }

  UnimodularAffineMap power(std::size_t e) const {
    UnimodularAffineMap out = identity(dimension());
    for (std::size_t i = 0; i < e; ++i) out = compose(out);
    return out;
  }
};

struct DecompositionPart {
  LatticePolytope polytope;
  BigRational capacity;
};

struct Decomposition {
  LatticePolytope whole;
  std::vector<DecompositionPart> parts;

  /// capacity -> number of parts
  std::map<BigRational, std::size_t> inventory() const {
    std::map<BigRational, std::size_t> out;
    for (const auto& p : parts) ++out[p.capacity];
    return out;
  }
};

/// hull{0, c e_1, ..., c e_n}
inline LatticePolytope standard_simplex(std::size_t n, const BigRational& c) {
  LatticePolytope s{n, {Point(n, 0)}};
  for (std::size_t i = 0; i < n; ++i) {
    Point v(n, 0);
    v[i] = c;
    s.vertices.push_back(std::move(v));
  }
  return s;
}

/// The simplex with vertices 0 and a_i e_i.
inline LatticePolytope moment_polytope(const std::vector<BigRational>& axes) {
  if (axes.empty()) throw InvalidInput("moment_polytope needs at least one axis");
  for (const auto& a : axes)
    if (a <= 0) throw InvalidInput("moment_polytope needs positive axes");
  const std::size_t n = axes.size();
  LatticePolytope p{n, {Point(n, 0)}};
  for (std::size_t i = 0; i < n; ++i) {
    Point v(n, 0);
    v[i] = axes[i];
    p.vertices.push_back(std::move(v));
  }
  return p;
}

/// A unimodular map sending `part` onto the standard simplex of capacity c,
/// if one exists. Tries each vertex as the preimage of the origin.
inline std::optional<UnimodularAffineMap> standard_simplex_map(const LatticePolytope& part, const BigRational& c) {
  if (!part.is_simplex() || c <= 0) return std::nullopt;
  const std::size_t n = part.dimension;
  const LatticePolytope target = standard_simplex(n, c);
  for (std::size_t origin = 0; origin < part.vertices.size(); ++origin) {
    // Columns (v_i - v_origin) / c must form an integer basis.
    IntMatrix cols(n, std::vector<BigInt>(n));
    bool integral = true;
    std::size_t col = 0;
    for (std::size_t i = 0; i < part.vertices.size() && integral; ++i) {
      if (i == origin) continue;
      for (std::size_t r = 0; r < n; ++r) {
        BigRational q = (part.vertices[i][r] - part.vertices[origin][r]) / c;
        if (!is_integer(q)) {
          integral = false;
          break;
        }
        cols[r][col] = q.get_num();
      }
      ++col;
    }
    if (!integral) continue;
    BigInt det = detail::determinant(cols);
    if (det != 1 && det != -1) continue;
    // Inverse of an integer matrix with det +-1 is integral: adjugate / det.
    IntMatrix inv(n, std::vector<BigInt>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        IntMatrix minor;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == j) continue;
          std::vector<BigInt> row;
          for (std::size_t k = 0; k < n; ++k)
            if (k != i) row.push_back(cols[r][k]);
          minor.push_back(std::move(row));
        }
        BigInt cof = n == 1 ? BigInt(1) : detail::determinant(minor);
        if ((i + j) % 2) cof = -cof;
        inv[i][j] = cof * det;
      }
    UnimodularAffineMap m{inv, Point(n, 0)};
    Point shifted = m.apply(part.vertices[origin]);
    for (std::size_t r = 0; r < n; ++r) m.translation[r] = -shifted[r];
    if (m.apply(part).same_vertices(target)) return m;
  }
  return std::nullopt;
}

struct TilingReport {
  bool ok = true;
  std::string reason;
  /// One map per part, sending it to the standard simplex of its capacity.
  std::vector<UnimodularAffineMap> maps;

  explicit operator bool() const { return ok; }
};

namespace detail {

inline std::vector<Point> edge_directions(const LatticePolytope& p) {
  std::vector<Point> out;
  for (std::size_t i = 0; i < p.vertices.size(); ++i)
    for (std::size_t j = i + 1; j < p.vertices.size(); ++j) out.push_back(minus(p.vertices[j], p.vertices[i]));
  return out;
}

inline bool separated_by(const LatticePolytope& a, const LatticePolytope& b, const Point& u) {
  BigRational amax = dot(u, a.vertices[0]), amin = amax, bmax = dot(u, b.vertices[0]), bmin = bmax;
  for (const auto& v : a.vertices) {
    BigRational s = dot(u, v);
    if (s > amax) amax = s;
    if (s < amin) amin = s;
  }
  for (const auto& v : b.vertices) {
    BigRational s = dot(u, v);
    if (s > bmax) bmax = s;
    if (s < bmin) bmin = s;
  }
  return amax <= bmin || bmax <= amin;
}

/// Two convex polytopes have disjoint interiors iff some hyperplane weakly
/// separates them, and such a hyperplane can always be chosen parallel to
/// n - 1 independent edge directions taken from the two polytopes.
inline bool interiors_disjoint(const LatticePolytope& a, const LatticePolytope& b) {
  const std::size_t n = a.dimension;
  std::vector<Point> dirs = edge_directions(a);
  for (auto& d : edge_directions(b)) dirs.push_back(std::move(d));
  if (n == 1) return separated_by(a, b, Point{1});
  std::vector<std::size_t> pick(n - 1);
  std::vector<Point> rows(n - 1);
  auto try_all = [&](auto&& self, std::size_t depth, std::size_t start) -> bool {
    if (depth == n - 1) {
      Point u = normal_of(rows, n);
      return !is_zero(u) && separated_by(a, b, u);
    }
    for (std::size_t i = start; i < dirs.size(); ++i) {
      rows[depth] = dirs[i];
      if (self(self, depth + 1, i + 1)) return true;
    }
    return false;
  };
  return try_all(try_all, 0, 0);
}

inline std::pair<Point, Point> bounding_box(const LatticePolytope& p) {
  Point lo = p.vertices[0], hi = p.vertices[0];
  for (const auto& v : p.vertices)
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] < lo[i]) lo[i] = v[i];
      if (v[i] > hi[i]) hi[i] = v[i];
    }
  return {lo, hi};
}

}  // namespace detail

/// Exact check that the parts tile the whole: every part is a
/// full-dimensional simplex inside the whole, volumes add up, interiors are
/// pairwise disjoint, and each part is unimodular-equivalent to the standard
/// simplex of its claimed capacity.
inline TilingReport verify_tiling(const Decomposition& d) {
  TilingReport report;
  auto fail = [&](std::string why) {
    report.ok = false;
    report.reason = std::move(why);
    report.maps.clear();
    return report;
  };
  const std::size_t n = d.whole.dimension;
  if (!d.whole.is_simplex() || d.whole.volume() == 0) return fail("whole is not a full-dimensional simplex");
  if (d.parts.empty()) return fail("no parts");
  BigRational total = 0;
  for (std::size_t i = 0; i < d.parts.size(); ++i) {
    const auto& part = d.parts[i].polytope;
    const std::string tag = "part " + std::to_string(i + 1);
    if (part.dimension != n || !part.is_simplex()) return fail(tag + " is not a simplex of the right dimension");
    BigRational vol = part.volume();
    if (vol == 0) return fail(tag + " is degenerate");
    for (const auto& v : part.vertices)
      if (!d.whole.contains(v)) return fail(tag + " vertex " + detail::point_string(v) + " lies outside the whole");
    auto map = standard_simplex_map(part, d.parts[i].capacity);
    if (!map) return fail(tag + " is not unimodular-equivalent to a simplex of capacity " + to_string(d.parts[i].capacity));
    report.maps.push_back(std::move(*map));
    total += vol;
  }
  if (total != d.whole.volume())
    return fail("volumes sum to " + to_string(total) + " instead of " + to_string(d.whole.volume()));

  // Sweep along the first coordinate; only pairs whose boxes overlap with
  // positive measure need the separation test.
  struct Box {
    Point lo, hi;
    std::size_t index;
  };
  std::vector<Box> boxes;
  for (std::size_t i = 0; i < d.parts.size(); ++i) {
    auto [lo, hi] = detail::bounding_box(d.parts[i].polytope);
    boxes.push_back(Box{std::move(lo), std::move(hi), i});
  }
  std::sort(boxes.begin(), boxes.end(), [](const Box& a, const Box& b) { return a.lo[0] < b.lo[0]; });
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    for (std::size_t j = i + 1; j < boxes.size() && boxes[j].lo[0] < boxes[i].hi[0]; ++j) {
      bool overlap = true;
      for (std::size_t c = 0; c < n && overlap; ++c)
        overlap = boxes[i].lo[c] < boxes[j].hi[c] && boxes[j].lo[c] < boxes[i].hi[c];
      if (!overlap) continue;
      const auto& a = d.parts[boxes[i].index].polytope;
      const auto& b = d.parts[boxes[j].index].polytope;
      if (!detail::interiors_disjoint(a, b))
        return fail("parts " + std::to_string(std::min(boxes[i].index, boxes[j].index) + 1) + " and " +
                    std::to_string(std::max(boxes[i].index, boxes[j].index) + 1) + " overlap");
    }
  }
  // Re-check the produced maps.
  for (std::size_t i = 0; i < d.parts.size(); ++i) {
    report.maps[i].validate();
    if (!report.maps[i].apply(d.parts[i].polytope).same_vertices(standard_simplex(n, d.parts[i].capacity)))
      return fail("map for part " + std::to_string(i + 1) + " does not reach the standard simplex");
  }
  return report;
}

/// The j-th slice hull{e_1, ..., e_{n-1}, (j-1) e_n, j e_n}.
inline LatticePolytope slice(const BigInt& j, std::size_t n) {
  LatticePolytope p{n, {}};
  for (std::size_t i = 0; i + 1 < n; ++i) {
    Point v(n, 0);
    v[i] = 1;
    p.vertices.push_back(std::move(v));
  }
  Point lo(n, 0), hi(n, 0);
  lo[n - 1] = BigRational(j - 1);
  hi[n - 1] = BigRational(j);
  p.vertices.push_back(std::move(lo));
  p.vertices.push_back(std::move(hi));
  return p;
}

/// x_n -> x_n - 1 + x_1 + ... + x_{n-1}, other coordinates fixed.
inline UnimodularAffineMap slice_shift(std::size_t n) {
  UnimodularAffineMap theta = UnimodularAffineMap::identity(n);
  for (std::size_t i = 0; i + 1 < n; ++i) theta.linear[n - 1][i] = 1;
  theta.translation[n - 1] = -1;
  return theta;
}

struct Subdivision {
  std::vector<LatticePolytope> parts;
  UnimodularAffineMap theta;

  Decomposition as_decomposition(const BigInt& k) const {
    const std::size_t n = theta.dimension();
    std::vector<BigRational> axes(n, 1);
    axes[n - 1] = BigRational(k);
    Decomposition d{moment_polytope(axes), {}};
    for (const auto& p : parts) d.parts.push_back(DecompositionPart{p, 1});
    return d;
  }
};

namespace detail {

inline void check_slice_step(const UnimodularAffineMap& theta, const LatticePolytope& whole, const BigInt& j, std::size_t n) {
  LatticePolytope dj = slice(j, n);
  for (const auto& v : dj.vertices)
    if (!whole.contains(v)) throw VerificationFailed("slice " + j.get_str() + " leaves the moment polytope");
  if (j > 1 && !theta.apply(dj).same_vertices(slice(j - 1, n)))
    throw VerificationFailed("theta does not map slice " + j.get_str() + " onto slice " + BigInt(j - 1).get_str());
}

}  // namespace detail

/// k slices of the moment polytope of E(1, ..., 1, k), with theta mapping
/// each slice onto the previous one.
inline Subdivision subdivide(std::size_t k, std::size_t n) {
  if (k == 0) throw InvalidInput("subdivide needs k >= 1");
  if (n < 2) throw InvalidInput("subdivide needs n >= 2");
  UnimodularAffineMap theta = slice_shift(n);
  if (theta.determinant() != 1) throw VerificationFailed("theta is not unimodular");
  std::vector<BigRational> axes(n, 1);
  axes[n - 1] = BigRational(static_cast<unsigned long>(k));
  const LatticePolytope whole = moment_polytope(axes);
  Subdivision s{{}, theta};
  const LatticePolytope first = slice(1, n);
  for (std::size_t j = 1; j <= k; ++j) {
    BigInt bj(static_cast<unsigned long>(j));
    detail::check_slice_step(theta, whole, bj, n);
    LatticePolytope dj = slice(bj, n);
    if (!theta.power(j - 1).apply(dj).same_vertices(first))
      throw VerificationFailed("theta^(j-1) does not map slice " + std::to_string(j) + " to the first slice");
    s.parts.push_back(std::move(dj));
  }
  return s;
}

/// Slice check for k too large to list: the slice vertices and their theta
/// images are affine in j, and the pairwise separating functional
/// x_n + j (x_1 + ... + x_{n-1}) - j is affine in j as well, so verifying
/// the identities at three values of j and containment at the two extreme
/// slices covers every j in 1..k. Volumes are 1/n! each, k/n! in total.
inline TilingReport verify_slices_affine(const BigInt& k, std::size_t n) {
  TilingReport r;
  auto fail = [&](std::string why) {
    r.ok = false;
    r.reason = std::move(why);
    return r;
  };
  if (k < 1 || n < 2) return fail("need k >= 1 and n >= 2");
  UnimodularAffineMap theta = slice_shift(n);
  if (theta.determinant() != 1) return fail("theta is not unimodular");
  std::vector<BigRational> axes(n, 1);
  axes[n - 1] = BigRational(k);
  const LatticePolytope whole = moment_polytope(axes);
  try {
    for (BigInt j : {BigInt(1), BigInt(2), BigInt(3), k})
      if (j >= 1 && j <= k) detail::check_slice_step(theta, whole, j, n);
  } catch (const VerificationFailed& e) {
    return fail(e.what());
  }
  for (BigInt j : {BigInt(1), BigInt(2), BigInt(3)}) {
    Point u(n, BigRational(j));
    u[n - 1] = 1;
    for (const auto& v : slice(j, n).vertices)
      if (detail::dot(u, v) - BigRational(j) > 0) return fail("separation fails below slice boundary");
    for (const auto& v : slice(j + 1, n).vertices)
      if (detail::dot(u, v) - BigRational(j) < 0) return fail("separation fails above slice boundary");
  }
  BigRational slice_vol = slice(1, n).volume();
  if (slice_vol * BigRational(k) != whole.volume()) return fail("slice volumes do not add up");
  auto map = standard_simplex_map(slice(1, n), 1);
  if (!map) return fail("first slice is not a standard simplex");
  r.maps.push_back(*map);
  return r;
}

namespace detail {

inline LatticePolytope triangle(const BigRational& x0, const BigRational& y0, const BigRational& x1, const BigRational& y1,
                                const BigRational& x2, const BigRational& y2) {
  return LatticePolytope{2, {Point{x0, y0}, Point{x1, y1}, Point{x2, y2}}};
}

}  // namespace detail

/// Triangle of capacity K = k^(x+1): a corner triangle of capacity K - s at
/// the origin, s = k^x, and the strip between the diagonals x + y = K - s and
/// x + y = K cut into k upward and k - 1 downward triangles of capacity s.
/// Parts are listed as corner, up_0, down_0, up_1, ..., up_{k-1}.
inline Decomposition fig2_decomposition(unsigned long k, unsigned long x) {
  if (k < 2) throw InvalidInput("fig2_decomposition needs k >= 2");
  if (x < 1) throw InvalidInput("fig2_decomposition needs x >= 1");
  const BigRational s(pow_int(BigInt(k), x));
  const BigRational K = s * BigRational(k);
  Decomposition d{moment_polytope({K, K}), {}};
  d.parts.push_back(DecompositionPart{detail::triangle(0, 0, K - s, 0, 0, K - s), K - s});
  auto L = [&](unsigned long i) { return Point{s * BigRational(k - 1 - i), s * BigRational(i)}; };
  auto U = [&](unsigned long i) { return Point{s * BigRational(k - i), s * BigRational(i)}; };
  for (unsigned long i = 0; i < k; ++i) {
    d.parts.push_back(DecompositionPart{LatticePolytope{2, {L(i), U(i), U(i + 1)}}, s});
    if (i + 1 < k) d.parts.push_back(DecompositionPart{LatticePolytope{2, {L(i), L(i + 1), U(i + 1)}}, s});
  }
  return d;
}

/// Triangle of capacity s cut into s^2 unit triangles of both orientations.
inline Decomposition unit_subdivide(unsigned long s) {
  if (s < 1) throw InvalidInput("unit_subdivide needs s >= 1");
  BigRational S(s);
  Decomposition d{moment_polytope({S, S}), {}};
  for (unsigned long i = 0; i < s; ++i)
    for (unsigned long j = 0; i + j < s; ++j) {
      BigRational a(i), b(j);
      d.parts.push_back(DecompositionPart{detail::triangle(a, b, a + 1, b, a, b + 1), 1});
      if (i + j + 2 <= s) d.parts.push_back(DecompositionPart{detail::triangle(a + 1, b, a, b + 1, a + 1, b + 1), 1});
    }
  return d;
}

/// The ball inventory of E(1, k^(2x+1)) -> E(k^x, k^(x+1)): the figure's
/// corner and downward triangles kept whole, each upward triangle replaced
/// by its unit subdivision translated into place.
inline Decomposition fig2_refined(unsigned long k, unsigned long x) {
  Decomposition coarse = fig2_decomposition(k, x);
  Decomposition out{coarse.whole, {coarse.parts[0]}};
  const BigRational s(pow_int(BigInt(k), x));
  if (!s.get_num().fits_ulong_p()) throw ResourceLimit("unit subdivision too large");
  Decomposition unit = unit_subdivide(s.get_num().get_ui());
  for (std::size_t p = 1; p < coarse.parts.size(); ++p) {
    const auto& part = coarse.parts[p];
    if (p % 2 == 0) {
      out.parts.push_back(part);
      continue;
    }
    // Upward triangle {L_i, U_i, U_{i+1}} is L_i + standard simplex of size s.
    const Point& origin = part.polytope.vertices[0];
    for (const auto& u : unit.parts) {
      LatticePolytope moved = u.polytope;
      for (auto& v : moved.vertices)
        for (std::size_t c = 0; c < 2; ++c) v[c] += origin[c];
      out.parts.push_back(DecompositionPart{std::move(moved), 1});
    }
  }
  return out;
}

inline nlohmann::ordered_json polytope_to_json(const LatticePolytope& p) {
  nlohmann::ordered_json verts = nlohmann::ordered_json::array();
  for (const auto& v : p.vertices) {
    nlohmann::ordered_json pt = nlohmann::ordered_json::array();
    for (const auto& c : v) pt.push_back(to_string(c));
    verts.push_back(std::move(pt));
  }
  return nlohmann::ordered_json{{"dimension", p.dimension}, {"vertices", std::move(verts)}};
}

/// {whole: {dimension, vertices}, parts: [{capacity, vertices}]}, with
/// coordinates as exact "p/q" strings.
inline nlohmann::ordered_json decomposition_to_json(const Decomposition& d) {
  nlohmann::ordered_json parts = nlohmann::ordered_json::array();
  for (const auto& p : d.parts) {
    nlohmann::ordered_json j;
    j["capacity"] = to_string(p.capacity);
    j["vertices"] = polytope_to_json(p.polytope)["vertices"];
    parts.push_back(std::move(j));
  }
  return nlohmann::ordered_json{{"schema", "symcap.decomposition/1"}, {"whole", polytope_to_json(d.whole)}, {"parts", std::move(parts)}};
}

inline LatticePolytope polytope_from_json(const nlohmann::ordered_json& j, std::size_t dimension) {
  LatticePolytope p{dimension, {}};
  for (const auto& v : j) {
    Point pt;
    for (const auto& c : v) pt.push_back(parse_rational(c.get<std::string>()));
    if (pt.size() != dimension) throw InvalidInput("vertex of wrong dimension");
    p.vertices.push_back(std::move(pt));
  }
  return p;
}

inline Decomposition decomposition_from_json(const nlohmann::ordered_json& j) {
  try {
    std::size_t n = j.at("whole").at("dimension").get<std::size_t>();
    Decomposition d{polytope_from_json(j.at("whole").at("vertices"), n), {}};
    for (const auto& part : j.at("parts"))
      d.parts.push_back(DecompositionPart{polytope_from_json(part.at("vertices"), n),
                                          parse_rational(part.at("capacity").get<std::string>())});
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed decomposition JSON: ") + e.what());
  }
}

}  // namespace symcap
