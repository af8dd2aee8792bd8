#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <vector>

#include "texinv/geometry.hpp"

namespace texinv {

inline double signed_area(std::span<const Point2> pts) {
  double twice = 0.0;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) twice += cross(pts[i], pts[(i + 1) % n]);
  return 0.5 * twice;
}

/// Keeps the part of a convex ring where side(p) >= 0; side must be affine.
template <class SideFn>
std::vector<Point2> clip_ring(std::span<const Point2> ring, SideFn&& side) {
  std::vector<Point2> out;
  const std::size_t n = ring.size();
  if (n == 0) return out;
  out.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 cur = ring[i];
    const Point2 nxt = ring[(i + 1) % n];
    const double dc = side(cur);
    const double dn = side(nxt);
    if (dc >= 0.0) out.push_back(cur);
    if ((dc >= 0.0) != (dn >= 0.0)) out.push_back(lerp(cur, nxt, dc / (dc - dn)));
  }
  return out;
}

/// Keeps the part of a convex ring where line.eval(p) * keep_sign >= 0.
inline std::vector<Point2> clip_half_plane(std::span<const Point2> ring, const Line2& line, double keep_sign = 1.0) {
  return clip_ring(ring, [&](Point2 p) { return keep_sign * line.eval(p); });
}

/// Counterclockwise (positive signed area) strictly convex polygon.
class ConvexPolygon2 {
 public:
  ConvexPolygon2() = default;

  /// Validates and cleans a ring: near-duplicate and collinear vertices are
  /// dropped, clockwise input is reversed. Throws InvalidPolygon otherwise.
  static ConvexPolygon2 from_points(std::vector<Point2> pts, const Tolerances& tol = {}) {
    auto cleaned = clean(std::move(pts), tol);
    if (!cleaned) throw Error(ErrorCode::InvalidPolygon, "ring is degenerate or not convex");
    return *cleaned;
  }

  /// Accepts a ring only if it is already clean, keeping it bit-for-bit.
  static ConvexPolygon2 from_clean_points(std::vector<Point2> pts, const Tolerances& tol = {}) {
    auto cleaned = clean(pts, tol);
    if (!cleaned || cleaned->vertices_ != pts) throw Error(ErrorCode::InvalidPolygon, "ring is not a clean convex polygon");
    return *cleaned;
  }

  static std::optional<ConvexPolygon2> try_from_points(std::vector<Point2> pts, const Tolerances& tol = {}) {
    return clean(std::move(pts), tol);
  }

  static ConvexPolygon2 rectangle(Point2 lo, Point2 hi) {
    return from_points({lo, {hi.x, lo.y}, hi, {lo.x, hi.y}});
  }

  const std::vector<Point2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const Point2& operator[](std::size_t i) const { return vertices_[i]; }
  Segment2 edge(std::size_t i) const { return {vertices_[i], vertices_[(i + 1) % vertices_.size()]}; }
  Line2 edge_line(std::size_t i) const { return Line2::through(edge(i).a, edge(i).b); }

  double area() const { return signed_area(vertices_); }

  Point2 centroid() const {
    double cx = 0.0, cy = 0.0, twice = 0.0;
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2 p = vertices_[i];
      const Point2 q = vertices_[(i + 1) % n];
      const double w = cross(p, q);
      twice += w;
      cx += (p.x + q.x) * w;
      cy += (p.y + q.y) * w;
    }
    return {cx / (3.0 * twice), cy / (3.0 * twice)};
  }

  /// Point-in-polygon with boundary counted inside up to eps.
  bool contains(Point2 p, double eps = 0.0) const {
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2 a = vertices_[i];
      const Point2 b = vertices_[(i + 1) % n];
      const double len = distance(a, b);
      if (cross(b - a, p - a) < -eps * len) return false;
    }
    return true;
  }

  friend bool operator==(const ConvexPolygon2&, const ConvexPolygon2&) = default;

 private:
  explicit ConvexPolygon2(std::vector<Point2> v) : vertices_(std::move(v)) {}

  static std::optional<ConvexPolygon2> clean(std::vector<Point2> pts, const Tolerances& tol) {
    for (const auto& p : pts)
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) return std::nullopt;
    // drop near-duplicates, including the wrap-around pair
    std::vector<Point2> v;
    for (const auto& p : pts)
      if (v.empty() || distance(v.back(), p) > tol.dist) v.push_back(p);
    while (v.size() > 1 && distance(v.front(), v.back()) <= tol.dist) v.pop_back();
    if (v.size() < 3) return std::nullopt;
    if (signed_area(v) < 0.0) std::reverse(v.begin(), v.end());
    // drop collinear vertices until stable
    bool changed = true;
    while (changed && v.size() >= 3) {
      changed = false;
      for (std::size_t i = 0; i < v.size() && v.size() >= 3; ++i) {
        const Point2 prev = v[(i + v.size() - 1) % v.size()];
        const Point2 next = v[(i + 1) % v.size()];
        const Point2 d0 = v[i] - prev;
        const Point2 d1 = next - v[i];
        if (std::abs(cross(d0, d1)) <= tol.col * norm(d0) * norm(d1) && dot(d0, d1) > 0.0) {
          v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
          changed = true;
          break;
        }
      }
    }
    if (v.size() < 3) return std::nullopt;
    if (signed_area(v) <= tol.area) return std::nullopt;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Point2 d0 = v[(i + 1) % v.size()] - v[i];
      const Point2 d1 = v[(i + 2) % v.size()] - v[(i + 1) % v.size()];
      if (cross(d0, d1) <= 0.0) return std::nullopt;
    }
    return ConvexPolygon2(std::move(v));
  }

  std::vector<Point2> vertices_;
};

/// Intersection of two convex polygons; nullopt when the overlap area is
/// below tol.area.
inline std::optional<ConvexPolygon2> clip_polygon(const ConvexPolygon2& subject, const ConvexPolygon2& clip,
                                                  const Tolerances& tol = {}) {
  std::vector<Point2> ring = subject.vertices();
  for (std::size_t i = 0; i < clip.size() && !ring.empty(); ++i) {
    const Segment2 e = clip.edge(i);
    const Point2 d = normalized(e.b - e.a);
    // interior of a CCW polygon is to the left of each edge
    ring = clip_ring(ring, [&](Point2 p) { return cross(d, p - e.a); });
  }
  if (ring.size() < 3 || signed_area(ring) < tol.area) return std::nullopt;
  return ConvexPolygon2::try_from_points(std::move(ring), tol);
}

/// Clip by a half-plane; nullopt when nothing of positive area remains.
inline std::optional<ConvexPolygon2> clip_polygon(const ConvexPolygon2& subject, const Line2& line,
                                                  double keep_sign, const Tolerances& tol = {}) {
  auto ring = clip_half_plane(subject.vertices(), line, keep_sign);
  if (ring.size() < 3 || signed_area(ring) < tol.area) return std::nullopt;
  return ConvexPolygon2::try_from_points(std::move(ring), tol);
}

}  // namespace texinv
