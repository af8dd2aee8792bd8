#pragma once

#include <array>
#include <cmath>

#include "texinv/error.hpp"

namespace texinv {

/// Numerical tolerances for picture-scale double geometry.
///
/// `dist` and `area` are absolute (picture units); `par` is an angle in
/// radians and `col` the sine of a turning angle. Use for_picture() to scale
/// to a W x H picture.
struct Tolerances {
  double dist = 1e-9;
  double par = 1e-9;
  double col = 1e-9;
  double area = 1e-12;

  static Tolerances for_picture(double width, double height) {
    Tolerances t;
    t.dist = 1e-9 * std::hypot(width, height);
    t.area = 1e-12 * width * height;
    return t;
  }
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline Point2 midpoint(Point2 a, Point2 b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }
inline Point2 lerp(Point2 a, Point2 b, double t) { return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)}; }

inline Point2 normalized(Point2 a) {
  const double n = norm(a);
  return {a.x / n, a.y / n};
}

// Flips a direction so its first nonzero component is positive.
inline Point2 canonical_direction(Point2 d) {
  d = normalized(d);
  if (d.x < 0.0 || (d.x == 0.0 && d.y < 0.0)) d = {-d.x, -d.y};
  return d;
}

struct Segment2 {
  Point2 a;
  Point2 b;

  double length() const { return distance(a, b); }
  Point2 mid() const { return midpoint(a, b); }

  friend bool operator==(const Segment2&, const Segment2&) = default;
};

/// Line a*x + b*y + c = 0 in canonical form: a^2 + b^2 = 1 and the first
/// nonzero of (a, b) positive. Canonical lines compare equal coefficientwise.
class Line2 {
 public:
  static Line2 from_coefficients(double a, double b, double c) {
    const double n = std::hypot(a, b);
    if (!(n > 0.0) || !std::isfinite(n) || !std::isfinite(c))
      throw Error(ErrorCode::InvalidArgument, "line normal must be finite and nonzero");
    a /= n;
    b /= n;
    c /= n;
    if (a < 0.0 || (a == 0.0 && b < 0.0)) {
      a = -a;
      b = -b;
      c = -c;
    }
    return Line2(a, b, c);
  }

  /// Accepts stored coefficients verbatim; they must already be canonical.
  static Line2 from_canonical(double a, double b, double c) {
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || std::abs(std::hypot(a, b) - 1.0) > 1e-12 ||
        a < 0.0 || (a == 0.0 && b < 0.0))
      throw Error(ErrorCode::InvalidArgument, "coefficients are not a canonical line");
    return Line2(a, b, c);
  }

  static Line2 through(Point2 p, Point2 q) {
    return from_coefficients(p.y - q.y, q.x - p.x, p.x * q.y - q.x * p.y);
  }

  static Line2 through_direction(Point2 p, Point2 dir) { return through(p, p + dir); }

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  std::array<double, 3> coefficients() const { return {a_, b_, c_}; }

  /// Signed distance of p from the line.
  double eval(Point2 p) const { return a_ * p.x + b_ * p.y + c_; }
  Point2 normal() const { return {a_, b_}; }
  Point2 direction() const { return {-b_, a_}; }
  Point2 project(Point2 p) const { return p - eval(p) * normal(); }

  friend bool operator==(const Line2&, const Line2&) = default;

 private:
  Line2(double a, double b, double c) : a_(a), b_(b), c_(c) {}

  double a_;
  double b_;
  double c_;
};

/// A point of the projective plane: either finite, or a point at infinity
/// identified by a canonical unit direction.
class ProjectivePoint2 {
 public:
  static ProjectivePoint2 finite(Point2 p) { return ProjectivePoint2(true, p); }
  static ProjectivePoint2 at_infinity(Point2 dir) {
    return ProjectivePoint2(false, canonical_direction(dir));
  }
  /// Stored direction taken verbatim.
  static ProjectivePoint2 at_infinity_exact(Point2 dir) { return ProjectivePoint2(false, dir); }

  bool is_finite() const { return finite_; }
  Point2 position() const {
    if (!finite_) throw Error(ErrorCode::InvalidArgument, "point at infinity has no position");
    return value_;
  }
  Point2 direction() const {
    if (finite_) throw Error(ErrorCode::InvalidArgument, "finite point has no direction");
    return value_;
  }

  /// Homogeneous coordinates, after translating finite points by -origin.
  std::array<double, 3> homogeneous(Point2 origin = {}) const {
    if (finite_) return {value_.x - origin.x, value_.y - origin.y, 1.0};
    return {value_.x, value_.y, 0.0};
  }

  friend bool operator==(const ProjectivePoint2&, const ProjectivePoint2&) = default;

 private:
  ProjectivePoint2(bool finite, Point2 v) : finite_(finite), value_(v) {}

  bool finite_;
  Point2 value_;
};

inline bool lines_parallel(const Line2& l1, const Line2& l2, const Tolerances& tol = {}) {
  return std::abs(l1.a() * l2.b() - l2.a() * l1.b()) < tol.par;
}

inline bool lines_coincident(const Line2& l1, const Line2& l2, const Tolerances& tol = {}) {
  if (!lines_parallel(l1, l2, tol)) return false;
  const double orient = dot(l1.normal(), l2.normal()) < 0.0 ? -1.0 : 1.0;
  return std::abs(l1.c() - orient * l2.c()) < tol.dist;
}

/// Intersection of two lines; parallel lines meet at infinity.
/// Throws CoincidentLines when the lines are the same within tolerance.
inline ProjectivePoint2 intersect_lines(const Line2& l1, const Line2& l2, const Tolerances& tol = {}) {
  const double det = l1.a() * l2.b() - l2.a() * l1.b();
  if (std::abs(det) < tol.par) {
    if (lines_coincident(l1, l2, tol)) throw Error(ErrorCode::CoincidentLines, "lines coincide");
    return ProjectivePoint2::at_infinity(l1.direction());
  }
  const double x = (l1.b() * l2.c() - l2.b() * l1.c()) / det;
  const double y = (l2.a() * l1.c() - l1.a() * l2.c()) / det;
  return ProjectivePoint2::finite({x, y});
}

/// The bisector of l1 and l2 that runs through the wedge (or strip, for
/// parallel lines) containing interior_hint.
inline Line2 angle_bisector(const Line2& l1, const Line2& l2, Point2 interior_hint,
                            const Tolerances& tol = {}) {
  if (lines_coincident(l1, l2, tol)) throw Error(ErrorCode::CoincidentLines, "bisector of coincident lines");
  const double e1 = l1.eval(interior_hint);
  const double e2 = l2.eval(interior_hint);
  if (std::abs(e1) < tol.dist || std::abs(e2) < tol.dist)
    throw Error(ErrorCode::InvalidArgument, "bisector hint lies on an input line");
  const double s1 = e1 > 0.0 ? 1.0 : -1.0;
  const double s2 = e2 > 0.0 ? 1.0 : -1.0;
  // Points with s1*l1(x) == s2*l2(x) are equidistant inside the hinted wedge.
  double a = s1 * l1.a() - s2 * l2.a();
  double b = s1 * l1.b() - s2 * l2.b();
  double c = s1 * l1.c() - s2 * l2.c();
  if (std::hypot(a, b) < tol.par) {
    // parallel lines with the hint outside the strip: take the midline
    a = s1 * l1.a() + s2 * l2.a();
    b = s1 * l1.b() + s2 * l2.b();
    c = s1 * l1.c() + s2 * l2.c();
  }
  return Line2::from_coefficients(a, b, c);
}

/// Smallest angle between two lines, in [0, pi/2].
inline double angle_between(const Line2& l1, const Line2& l2) {
  const double s = std::abs(l1.a() * l2.b() - l2.a() * l1.b());
  const double c = std::abs(dot(l1.normal(), l2.normal()));
  return std::atan2(s, c);
}

}  // namespace texinv
