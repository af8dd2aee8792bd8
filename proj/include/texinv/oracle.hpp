#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "texinv/rng.hpp"
#include "texinv/scene.hpp"

namespace texinv {

/// Ground-truth planar patch: a 3D rectangle carrying a square-wave grating.
///
/// The rectangle spans half_grating along the grating direction and
/// half_divided across it. With zero in_plane_rotation the grating runs up
/// the slant (along the tilt direction), so its cross edges stay parallel
/// to the picture plane.
struct OraclePlaneSpec {
  double slant = 0.0;              // radians, [0, 75 deg]
  double tilt = 0.0;               // radians
  double half_grating = 50.0;
  double half_divided = 50.0;
  Point2 center_pixel;             // sight ray of the patch center
  double center_depth = 1000.0;    // Z of the center before reciprocity matching
  double in_plane_rotation = 0.0;  // radians, about the normal
  int f = 3;
  int order = 0;
  bool match_reciprocity = true;   // rescale so D1 follows the reciprocity convention
};

struct OracleTruth {
  double slant = 0.0;
  double tilt = 0.0;
  Vec3 normal;
  Point2 transformation_center;     // crossing of the two edge-pair bisectors
  Point2 projected_center;          // image of the rectangle's 3D center
  double chord = 0.0;               // B1 chord between the L0 and L1 images
  double d1 = 0.0;                  // distance beyond the picture plane along the sight ray of V1
  Vec3 anchor;                      // V4
  std::array<Vec3, 4> corners;      // 3D patch, same order as the segment polygon
};

struct OracleResult {
  TextureSegment segment;
  OracleTruth truth;
};

namespace oracle_detail {

struct Ray2 {
  Point2 origin;
  Point2 dir;
};

// a + s*da = b + t*db, solved by Cramer's rule
inline Point2 meet(const Ray2& a, const Ray2& b) {
  const double det = a.dir.x * (-b.dir.y) - a.dir.y * (-b.dir.x);
  const Point2 r = b.origin - a.origin;
  const double s = (r.x * (-b.dir.y) - r.y * (-b.dir.x)) / det;
  return a.origin + s * a.dir;
}

// Bisector of the images of two parallel 3D edges: through their vanishing
// point along the sum of unit rays toward the edges, or the midline when the
// edges stay parallel in the image.
inline Ray2 pair_bisector(Vec3 dir3, Segment2 e0, Segment2 e1, double d0, Point2 center) {
  if (std::abs(dir3.z) > 1e-15 * norm(dir3)) {
    const Point2 vp{d0 * dir3.x / dir3.z + center.x, d0 * dir3.y / dir3.z + center.y};
    const Point2 w = normalized(e0.mid() - vp) + normalized(e1.mid() - vp);
    return {vp, w};
  }
  return {midpoint(e0.mid(), e1.mid()), e0.b - e0.a};
}

}  // namespace oracle_detail

/// Projects the patch through the eye and reports the synthetic segment
/// with its known plane. Band lines are the images of the 3D grating lines.
/// Throws OutOfFrustum when a corner lies behind the eye or outside
/// [margin, W - margin] x [margin, H - margin].
inline OracleResult render_forward(const OraclePlaneSpec& spec, const ViewingGeometry& viewing,
                                   double inset_margin = 0.0) {
  using oracle_detail::Ray2;
  const double d0 = viewing.eye_distance;
  const Point2 pc = viewing.picture_center;

  const double tp = std::tan(spec.slant);
  const double p = tp * std::cos(spec.tilt);
  const double q = tp * std::sin(spec.tilt);
  const Vec3 n = normalized(Vec3{-p, -q, 1.0});
  const Vec3 across_tilt{-std::sin(spec.tilt), std::cos(spec.tilt), 0.0};
  const Vec3 up_slant = normalized(cross(n, across_tilt));
  const double cr = std::cos(spec.in_plane_rotation), sr = std::sin(spec.in_plane_rotation);
  const Vec3 grating = cr * up_slant + sr * across_tilt;  // L0 / L1 direction
  const Vec3 divided = -sr * up_slant + cr * across_tilt;  // L2 / L3 direction

  const Point2 cc = spec.center_pixel - pc;
  Vec3 center = (spec.center_depth / d0) * Vec3{cc.x, cc.y, d0};

  const double ga = spec.half_grating, da = spec.half_divided;
  // corner k = center + sg*ga*grating + sd*da*divided
  const double sg[4] = {-1, 1, 1, -1};
  const double sd[4] = {-1, -1, 1, 1};
  std::array<Vec3, 4> corners;
  for (int k = 0; k < 4; ++k) corners[k] = center + (sg[k] * ga) * grating + (sd[k] * da) * divided;

  auto project = [&](Vec3 v) -> Point2 {
    if (!(v.z > 0.0)) throw Error(ErrorCode::OutOfFrustum, "patch point behind the eye");
    return {d0 * v.x / v.z + pc.x, d0 * v.y / v.z + pc.y};
  };
  std::array<Point2, 4> img;
  for (int k = 0; k < 4; ++k) img[k] = project(corners[k]);
  for (const auto& v : img)
    if (v.x < inset_margin || v.x > 2.0 * pc.x - inset_margin || v.y < inset_margin ||
        v.y > 2.0 * pc.y - inset_margin)
      throw Error(ErrorCode::OutOfFrustum, "patch projects outside the picture inset");

  // edges 0 and 2 follow the grating, 1 and 3 are divided
  std::array<int, 4> order{0, 1, 2, 3};
  if (signed_area(std::vector<Point2>(img.begin(), img.end())) < 0.0) order = {0, 3, 2, 1};
  std::vector<Point2> ring;
  std::array<Vec3, 4> ordered_corners;
  for (int k = 0; k < 4; ++k) {
    ring.push_back(img[order[k]]);
    ordered_corners[k] = corners[order[k]];
  }
  auto ring_edge = [&](std::size_t i) { return Segment2{ring[i], ring[(i + 1) % 4]}; };
  // In both orders ring edges 0 and 2 join corners differing in the grating
  // coordinate only when the order is kept; the reversed ring swaps roles.
  const bool kept = order[1] == 1;
  const std::size_t g0 = kept ? 0 : 1, g1 = kept ? 2 : 3;
  const std::size_t v0 = kept ? 1 : 0, v1 = kept ? 3 : 2;

  OracleResult out;
  TextureSegment& seg = out.segment;
  seg.id = 0;
  seg.created_at = 1;
  seg.creation_polygon = ConvexPolygon2::from_points(ring);
  if (seg.creation_polygon.vertices() != ring)
    throw Error(ErrorCode::OutOfFrustum, "projected patch is degenerate");
  seg.clip_polygon = seg.creation_polygon;
  seg.f = spec.f;
  seg.order = spec.order;
  seg.roles.polygon = ring;
  const bool g0_longer = ring_edge(g0).length() >= ring_edge(g1).length();
  const bool v0_longer = ring_edge(v0).length() >= ring_edge(v1).length();
  seg.roles.edges[0] = {g0_longer ? g0 : g1};
  seg.roles.edges[1] = {g0_longer ? g1 : g0};
  seg.roles.edges[2] = {v0_longer ? v0 : v1};
  seg.roles.edges[3] = {v0_longer ? v1 : v0};

  // 3D grating lines at equal spacing across the divided direction
  const int count = 2 * spec.f;
  for (int k = 1; k < count; ++k) {
    const double s = -da + 2.0 * da * k / count;
    const Point2 a = project(center - ga * grating + s * divided);
    const Point2 b = project(center + ga * grating + s * divided);
    seg.band_lines.push_back(Line2::through(a, b));
  }

  OracleTruth& truth = out.truth;
  truth.slant = spec.slant;
  truth.tilt = std::fmod(std::fmod(spec.tilt, 2.0 * std::numbers::pi) + 2.0 * std::numbers::pi, 2.0 * std::numbers::pi);
  if (spec.slant == 0.0) truth.tilt = 0.0;
  truth.normal = n;
  truth.projected_center = project(center);

  const Segment2 l0 = seg.roles.segment(Role::L0), l1 = seg.roles.segment(Role::L1);
  const Segment2 l2 = seg.roles.segment(Role::L2), l3 = seg.roles.segment(Role::L3);
  const Ray2 b0 = oracle_detail::pair_bisector(grating, l0, l1, d0, pc);
  const Ray2 b1 = oracle_detail::pair_bisector(divided, l2, l3, d0, pc);
  truth.transformation_center = oracle_detail::meet(b0, b1);
  const Point2 c0 = oracle_detail::meet(b1, {l0.a, l0.b - l0.a});
  const Point2 c1 = oracle_detail::meet(b1, {l1.a, l1.b - l1.a});
  truth.chord = distance(c0, c1);

  const Point2 v1c = truth.transformation_center - pc;
  const Vec3 ray = normalized(Vec3{v1c.x, v1c.y, d0});
  const double to_picture = d0 / ray.z;
  const double hit = dot(n, center) / dot(n, ray);  // ray length to the plane
  if (!(hit > 0.0)) throw Error(ErrorCode::OutOfFrustum, "transformation center misses the plane");
  double scale = 1.0;
  if (spec.match_reciprocity) {
    if (!(truth.chord < viewing.reference_length))
      throw Error(ErrorCode::OutOfFrustum, "chord exceeds the reference length");
    truth.d1 = d0 * (viewing.reference_length / truth.chord - 1.0);
    scale = (to_picture + truth.d1) / hit;
  } else {
    truth.d1 = hit - to_picture;
  }
  truth.anchor = (scale * hit) * ray;
  for (int k = 0; k < 4; ++k) truth.corners[k] = scale * ordered_corners[k];
  return out;
}

struct SweepRange {
  double slant_lo = 5.0 * std::numbers::pi / 180.0;
  double slant_hi = 60.0 * std::numbers::pi / 180.0;
  double max_chord_ratio = 0.8;  // of Lr, keeps D1 well away from zero
};

/// Draws in-frustum oracle patches for a round-trip sweep. Attempts that
/// leave the inset or exceed the chord bound are redrawn.
inline OracleResult sample_oracle(StreamRng& rng, const ViewingGeometry& viewing, double inset_margin,
                                  const SweepRange& range = {}) {
  const double w = 2.0 * viewing.picture_center.x, h = 2.0 * viewing.picture_center.y;
  const double d0 = viewing.eye_distance;
  for (int attempt = 0; attempt < 10000; ++attempt) {
    OraclePlaneSpec spec;
    spec.slant = rng.uniform(range.slant_lo, range.slant_hi);
    spec.tilt = rng.uniform(0.0, 2.0 * std::numbers::pi);
    spec.in_plane_rotation = rng.uniform(-std::numbers::pi / 6.0, std::numbers::pi / 6.0);
    spec.center_pixel = {rng.uniform(0.35 * w, 0.65 * w), rng.uniform(0.35 * h, 0.65 * h)};
    spec.center_depth = rng.uniform(1.5 * d0, 3.0 * d0);
    const double size = std::min(w, h) * spec.center_depth / d0;
    spec.half_grating = rng.uniform(0.06, 0.15) * size;
    spec.half_divided = rng.uniform(0.06, 0.15) * size;
    spec.f = static_cast<int>(rng.integer(1, 10));
    spec.order = rng.bit();
    try {
      OracleResult r = render_forward(spec, viewing, inset_margin);
      if (r.truth.chord <= range.max_chord_ratio * viewing.reference_length) return r;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::OutOfFrustum) throw;
    }
  }
  throw Error(ErrorCode::SamplingExhausted, "no in-frustum oracle patch");
}

struct RoundTripErrors {
  double slant = 0.0;
  double tilt = 0.0;
  double center = 0.0;    // pixels
  double distance = 0.0;  // relative
  int trials = 0;
};

inline double angular_gap(double a, double b) {
  const double d = std::fmod(std::abs(a - b), 2.0 * std::numbers::pi);
  return std::min(d, 2.0 * std::numbers::pi - d);
}

/// Renders `trials` patches and inverts each; records the worst errors.
inline RoundTripErrors oracle_sweep(int trials, std::uint64_t seed, const GenConfig& config = {}) {
  const ViewingGeometry viewing = ViewingGeometry::for_config(config);
  const Tolerances tol = config.tolerances();
  StreamRng rng(seed, 0);
  RoundTripErrors worst;
  for (int t = 0; t < trials; ++t) {
    const OracleResult r = sample_oracle(rng, viewing, config.inset_margin());
    const PlaneEstimate est = estimate_plane(r.segment, viewing, tol);
    worst.slant = std::max(worst.slant, std::abs(est.slant - r.truth.slant));
    worst.tilt = std::max(worst.tilt, angular_gap(est.tilt, r.truth.tilt));
    worst.center = std::max(worst.center, distance(est.v1, r.truth.transformation_center));
    worst.distance = std::max(worst.distance, std::abs(est.d1 - r.truth.d1) / r.truth.d1);
    ++worst.trials;
  }
  return worst;
}

}  // namespace texinv
