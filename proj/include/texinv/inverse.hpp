#pragma once

#include <cmath>
#include <numbers>
#include <optional>

#include "texinv/picture.hpp"

namespace texinv {

/// Monocular viewing set-up. The eye sits on the optical axis through
/// picture_center at distance eye_distance (D0) from the picture plane.
/// reference_length (Lr) is the largest apparent pattern: half the picture
/// diagonal.
struct ViewingGeometry {
  double eye_distance = 512.0;
  double reference_length = 0.0;
  Point2 picture_center;

  static ViewingGeometry for_picture(double width, double height, double eye_distance) {
    if (!(eye_distance > 0.0)) throw Error(ErrorCode::InvalidArgument, "eye distance must be positive");
    return {eye_distance, 0.5 * std::hypot(width, height), {0.5 * width, 0.5 * height}};
  }

  static ViewingGeometry for_config(const GenConfig& c) {
    return for_picture(c.width, c.height, c.eye_distance);
  }

  /// Picture point relative to the optical axis.
  Point2 centered(Point2 p) const { return p - picture_center; }

  friend bool operator==(const ViewingGeometry&, const ViewingGeometry&) = default;
};

struct TrapezoidLines {
  Line2 l0, l1, l2, l3;
};

struct VanishingPoints {
  ProjectivePoint2 v2;  // L0 x L1
  ProjectivePoint2 v3;  // L2 x L3
};

struct SymmetryCenter {
  Line2 b0;
  Line2 b1;
  Point2 v1;
};

struct Orientation {
  double p = 0.0;
  double q = 0.0;
  double slant = 0.0;
  double tilt = 0.0;
};

struct PlaneEstimate {
  int segment_id = 0;
  Point2 v1;
  ProjectivePoint2 v2 = ProjectivePoint2::finite({});
  ProjectivePoint2 v3 = ProjectivePoint2::finite({});
  Line2 b0 = Line2::from_coefficients(1, 0, 0);
  Line2 b1 = Line2::from_coefficients(0, 1, 0);
  double alpha = 0.0;  // angle of B0 to the picture X axis, [0, pi)
  double beta = 0.0;   // angle of B1 to the picture Y axis, [0, pi)
  double p = 0.0;
  double q = 0.0;
  double slant = 0.0;
  double tilt = 0.0;
  double ls = 0.0;
  double d1 = 0.0;
  bool center_fallback = false;  // B0 parallel to B1, V1 is the cell centroid

  friend bool operator==(const PlaneEstimate&, const PlaneEstimate&) = default;
};

/// Carrier lines of the creation-time role edges. The current clip polygon
/// is never consulted.
inline TrapezoidLines trapezoid_lines(const TextureSegment& seg, const Tolerances& tol = {}) {
  auto carrier = [&](Role r) {
    const Segment2 s = seg.roles.segment(r);
    if (s.length() < tol.dist) throw Error(ErrorCode::DegenerateRoles, "role edge of zero length");
    return Line2::through(s.a, s.b);
  };
  return {carrier(Role::L0), carrier(Role::L1), carrier(Role::L2), carrier(Role::L3)};
}

inline VanishingPoints vanishing_points(const TrapezoidLines& t, const Tolerances& tol = {}) {
  return {intersect_lines(t.l0, t.l1, tol), intersect_lines(t.l2, t.l3, tol)};
}

/// Bisectors B0 (of L0, L1) and B1 (of L2, L3) through the wedges holding
/// the hint, and their crossing V1. Throws NoFiniteCenter when B0 || B1.
inline SymmetryCenter symmetry_center(const TrapezoidLines& t, Point2 interior_hint, const Tolerances& tol = {}) {
  const Line2 b0 = angle_bisector(t.l0, t.l1, interior_hint, tol);
  const Line2 b1 = angle_bisector(t.l2, t.l3, interior_hint, tol);
  const ProjectivePoint2 v1 = [&] {
    try {
      return intersect_lines(b0, b1, tol);
    } catch (const Error&) {
      throw Error(ErrorCode::NoFiniteCenter, "bisectors coincide");
    }
  }();
  if (!v1.is_finite()) throw Error(ErrorCode::NoFiniteCenter, "bisectors are parallel");
  return {b0, b1, v1.position()};
}

/// Plane orientation from the vanishing line through V2 and V3.
///
/// With the eye at the origin and the picture plane at depth D0, a vanishing
/// line a*u + b*v + c = 0 (u, v centered on the optical axis) belongs to
/// planes with normal n ~ (a, b, c / D0). n is oriented with n_z > 0, then
/// p = -n_x / n_z, q = -n_y / n_z, slant = atan |(p, q)|, tilt = atan2(q, p).
inline Orientation orientation_from_vanishing(const ProjectivePoint2& v2, const ProjectivePoint2& v3,
                                              const ViewingGeometry& viewing) {
  const auto h2 = v2.homogeneous(viewing.picture_center);
  const auto h3 = v3.homogeneous(viewing.picture_center);
  const double a = h2[1] * h3[2] - h2[2] * h3[1];
  const double b = h2[2] * h3[0] - h2[0] * h3[2];
  const double c = h2[0] * h3[1] - h2[1] * h3[0];
  const double scale = std::hypot(h2[0], h2[1], h2[2]) * std::hypot(h3[0], h3[1], h3[2]);
  if (std::hypot(a, b, c) <= 1e-14 * scale)
    throw Error(ErrorCode::IdenticalVanishingPoints, "V2 and V3 coincide");

  Orientation o;
  if (a == 0.0 && b == 0.0) return o;  // line at infinity: fronto-parallel

  double nx = a, ny = b, nz = c / viewing.eye_distance;
  if (std::abs(nz) <= 1e-12 * std::hypot(nx, ny))
    throw Error(ErrorCode::EdgeOnPlane, "vanishing line passes through the principal point");
  if (nz < 0.0) {
    nx = -nx;
    ny = -ny;
    nz = -nz;
  }
  o.p = -nx / nz;
  o.q = -ny / nz;
  o.slant = std::atan(std::hypot(o.p, o.q));
  o.tilt = std::atan2(o.q, o.p);
  if (o.tilt < 0.0) o.tilt += 2.0 * std::numbers::pi;
  if (o.tilt >= 2.0 * std::numbers::pi) o.tilt -= 2.0 * std::numbers::pi;
  return o;
}

/// Length of B1 between its crossings with L0 and L1.
inline double measure_ls(const Line2& b1, const Line2& l0, const Line2& l1, const Tolerances& tol = {}) {
  const auto p0 = intersect_lines(b1, l0, tol);
  const auto p1 = intersect_lines(b1, l1, tol);
  if (!p0.is_finite() || !p1.is_finite()) throw Error(ErrorCode::UnboundedMeasure, "B1 parallel to L0 or L1");
  return distance(p0.position(), p1.position());
}

/// Similar triangles: a pattern of apparent extent Lr lies on the picture
/// plane, one of extent Ls lies D0 * (Lr / Ls - 1) beyond it. Clamped at 0.
inline double distance_from_reciprocity(double ls, const ViewingGeometry& viewing) {
  if (!(ls > 0.0)) throw Error(ErrorCode::NonpositiveExtent, "Ls must be positive");
  return std::max(0.0, viewing.eye_distance * (viewing.reference_length / ls - 1.0));
}

namespace detail {

inline double angle_mod_pi(double a) {
  a = std::fmod(a, std::numbers::pi);
  if (a < 0.0) a += std::numbers::pi;
  if (a >= std::numbers::pi) a -= std::numbers::pi;
  return a;
}

}  // namespace detail

inline PlaneEstimate estimate_plane(const TextureSegment& seg, const ViewingGeometry& viewing,
                                    const Tolerances& tol = {}) {
  PlaneEstimate est;
  est.segment_id = seg.id;
  const TrapezoidLines lines = trapezoid_lines(seg, tol);
  const VanishingPoints vp = vanishing_points(lines, tol);
  est.v2 = vp.v2;
  est.v3 = vp.v3;

  const Point2 hint = seg.creation_polygon.centroid();
  try {
    const SymmetryCenter sc = symmetry_center(lines, hint, tol);
    est.b0 = sc.b0;
    est.b1 = sc.b1;
    est.v1 = sc.v1;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoFiniteCenter) throw;
    est.b0 = angle_bisector(lines.l0, lines.l1, hint, tol);
    est.b1 = angle_bisector(lines.l2, lines.l3, hint, tol);
    est.v1 = hint;
    est.center_fallback = true;
  }
  const Point2 d0 = est.b0.direction();
  const Point2 d1 = est.b1.direction();
  est.alpha = detail::angle_mod_pi(std::atan2(d0.y, d0.x));
  est.beta = detail::angle_mod_pi(std::atan2(-d1.x, d1.y));

  const Orientation o = orientation_from_vanishing(vp.v2, vp.v3, viewing);
  est.p = o.p;
  est.q = o.q;
  est.slant = o.slant;
  est.tilt = o.tilt;

  est.ls = measure_ls(est.b1, lines.l0, lines.l1, tol);
  est.d1 = distance_from_reciprocity(est.ls, viewing);
  return est;
}

}  // namespace texinv
