#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "texinv/inverse.hpp"
#include "texinv/vec3.hpp"

namespace texinv {

/// Plane through `anchor` (V4) with unit normal, n_z > 0.
struct Plane3 {
  Vec3 normal{0.0, 0.0, 1.0};
  Vec3 anchor;

  double offset() const { return dot(normal, anchor); }
  double eval(Vec3 p) const { return dot(normal, p) - offset(); }

  friend bool operator==(const Plane3&, const Plane3&) = default;
};

struct Box3 {
  Vec3 lo;
  Vec3 hi;

  Vec3 center() const { return 0.5 * (lo + hi); }
  double diagonal() const { return distance(lo, hi); }
  bool contains(Vec3 p, double eps = 0.0) const {
    return p.x >= lo.x - eps && p.x <= hi.x + eps && p.y >= lo.y - eps && p.y <= hi.y + eps && p.z >= lo.z - eps &&
           p.z <= hi.z + eps;
  }

  friend bool operator==(const Box3&, const Box3&) = default;
};

enum class Trim { box, plane_intersection, sight_boundary };

inline const char* to_string(Trim t) {
  switch (t) {
    case Trim::box: return "box";
    case Trim::plane_intersection: return "plane-intersection";
    case Trim::sight_boundary: return "sight-boundary";
  }
  return "?";
}

/// Provenance of one boundary edge; partner is the other segment id for
/// plane and sight cuts, -1 for the box.
struct EdgeTag {
  Trim kind = Trim::box;
  int partner = -1;

  friend bool operator==(const EdgeTag&, const EdgeTag&) = default;
};

struct ScenePlane {
  int segment_id = 0;
  Plane3 plane;
  ConvexPolygon2 cell;            // 2D clip polygon the plane was built from
  std::vector<Vec3> base_patch;   // back-projected cell, same vertex order
  std::vector<Vec3> boundary;     // trimmed convex polygon on the plane
  std::vector<EdgeTag> provenance;  // provenance[k] tags boundary[k] -> boundary[k+1]

  friend bool operator==(const ScenePlane&, const ScenePlane&) = default;
};

struct SceneIssue {
  int segment_id = 0;
  ErrorCode code = ErrorCode::EmptyBoundary;
  std::string message;
};

struct SceneModel {
  ViewingGeometry viewing;
  Box3 box;
  std::vector<ScenePlane> planes;
  std::vector<SceneIssue> issues;
  std::uint64_t seed = 0;
  int iteration = 0;
};

/// Estimate paired with the segment's current clip polygon.
struct SceneInput {
  PlaneEstimate estimate;
  ConvexPolygon2 clip_polygon;
};

inline Vec3 sight_point(Point2 picture_point, const ViewingGeometry& viewing) {
  const Point2 c = viewing.centered(picture_point);
  return {c.x, c.y, viewing.eye_distance};
}

/// V4 is the point of the sight ray through V1 at eye distance D0' + D1,
/// D0' being the ray length up to the picture plane.
inline Plane3 place_plane(const PlaneEstimate& est, const ViewingGeometry& viewing) {
  const Vec3 ray = sight_point(est.v1, viewing);
  const double to_picture = norm(ray);
  Plane3 plane;
  plane.anchor = ((to_picture + est.d1) / to_picture) * ray;
  plane.normal = normalized(Vec3{-est.p, -est.q, 1.0});
  return plane;
}

/// Intersects the sight ray of every vertex with the plane.
inline std::vector<Vec3> back_project(const ConvexPolygon2& polygon, const Plane3& plane,
                                      const ViewingGeometry& viewing) {
  std::vector<Vec3> out;
  out.reserve(polygon.size());
  for (const auto& v : polygon.vertices()) {
    const Vec3 ray = sight_point(v, viewing);
    const double denom = dot(plane.normal, ray);
    if (std::abs(denom) <= 1e-12 * norm(ray)) throw Error(ErrorCode::RayParallelToPlane, "sight ray parallel to plane");
    const double t = plane.offset() / denom;
    if (!(t > 0.0)) throw Error(ErrorCode::BehindViewer, "plane meets the sight ray behind the eye");
    out.push_back(t * ray);
  }
  return out;
}

namespace detail {

struct TaggedRing {
  std::vector<Vec3> pts;
  std::vector<EdgeTag> tags;
};

// Keeps dot(m, x) <= e. Edges created along the cut carry `tag`.
inline TaggedRing clip_ring(const TaggedRing& in, Vec3 m, double e, EdgeTag tag, double merge_eps) {
  TaggedRing out;
  const std::size_t n = in.pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 cur = in.pts[i];
    const Vec3 nxt = in.pts[(i + 1) % n];
    const double dc = e - dot(m, cur);
    const double dn = e - dot(m, nxt);
    const bool cur_in = dc >= 0.0;
    const bool nxt_in = dn >= 0.0;
    if (cur_in) {
      out.pts.push_back(cur);
      out.tags.push_back(in.tags[i]);
    }
    if (cur_in != nxt_in) {
      const Vec3 hit = lerp(cur, nxt, dc / (dc - dn));
      out.pts.push_back(hit);
      out.tags.push_back(cur_in ? tag : in.tags[i]);
    }
  }
  // merge coincident neighbours; the survivor keeps the outgoing edge tag
  TaggedRing merged;
  for (std::size_t i = 0; i < out.pts.size(); ++i) {
    if (!merged.pts.empty() && distance(merged.pts.back(), out.pts[i]) <= merge_eps) {
      merged.tags.back() = out.tags[i];
      continue;
    }
    merged.pts.push_back(out.pts[i]);
    merged.tags.push_back(out.tags[i]);
  }
  while (merged.pts.size() > 1 && distance(merged.pts.front(), merged.pts.back()) <= merge_eps) {
    merged.pts.pop_back();
    merged.tags.pop_back();
  }
  if (merged.pts.size() < 3) return {};
  return merged;
}

inline bool point_in_planar_polygon(const std::vector<Vec3>& poly, Vec3 normal, Vec3 p, double eps) {
  bool has_pos = false, has_neg = false;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec3 a = poly[i];
    const Vec3 b = poly[(i + 1) % poly.size()];
    const double s = dot(cross(b - a, p - a), normal) / std::max(norm(b - a), 1e-300);
    if (s > eps) has_pos = true;
    if (s < -eps) has_neg = true;
  }
  return !(has_pos && has_neg);
}

// Edges of two convex cells overlap along a common line.
inline bool cells_adjacent(const ConvexPolygon2& a, const ConvexPolygon2& b, double eps) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Segment2 ea = a.edge(i);
    const double len = ea.length();
    const Point2 d = (1.0 / len) * (ea.b - ea.a);
    for (std::size_t j = 0; j < b.size(); ++j) {
      const Segment2 eb = b.edge(j);
      if (std::abs(cross(d, eb.a - ea.a)) > eps || std::abs(cross(d, eb.b - ea.a)) > eps) continue;
      const double t0 = dot(d, eb.a - ea.a);
      const double t1 = dot(d, eb.b - ea.a);
      const double overlap = std::min(len, std::max(t0, t1)) - std::max(0.0, std::min(t0, t1));
      if (overlap > eps) return true;
    }
  }
  return false;
}

// An edge of `of` whose outer side holds all of `other`.
inline std::optional<Segment2> separating_edge(const ConvexPolygon2& of, const ConvexPolygon2& other, double eps) {
  for (std::size_t i = 0; i < of.size(); ++i) {
    const Segment2 e = of.edge(i);
    const Point2 d = normalized(e.b - e.a);
    bool all_out = true;
    for (const auto& p : other.vertices()) all_out = all_out && cross(d, p - e.a) <= eps;
    if (all_out) return e;
  }
  return std::nullopt;
}

}  // namespace detail

/// Enclosing box: front face at the picture plane, back face at the farthest
/// reciprocity distance D0 * Lr / Ls_min, sides on the picture frustum at the
/// back face. Grown where needed to hold every base patch.
inline Box3 default_box(const std::vector<std::vector<Vec3>>& base_patches, double ls_min,
                        const ViewingGeometry& viewing) {
  const double d0 = viewing.eye_distance;
  double z_front = d0;
  double z_back = ls_min > 0.0 ? d0 * viewing.reference_length / ls_min : d0;
  for (const auto& patch : base_patches)
    for (const auto& p : patch) {
      z_front = std::min(z_front, p.z);
      z_back = std::max(z_back, p.z);
    }
  if (z_back <= z_front) z_back = z_front + d0;
  double hw = viewing.picture_center.x * z_back / d0;
  double hh = viewing.picture_center.y * z_back / d0;
  for (const auto& patch : base_patches)
    for (const auto& p : patch) {
      hw = std::max(hw, std::abs(p.x));
      hh = std::max(hh, std::abs(p.y));
    }
  const double pad = 1e-6 * std::max({hw, hh, z_back});
  z_front = std::max(0.5 * z_front, z_front - pad);
  return {{-hw - pad, -hh - pad, z_front}, {hw + pad, hh + pad, z_back + pad}};
}

/// Builds the bounded scene.
///
/// Each plane starts as its cross-section of the box. Planes of cells that
/// share a Voronoi edge are cut along their common line, each keeping the
/// side that holds its own base patch; a pair is left uncut when parallel or
/// when the line crosses a base patch. A plane that hides another's base
/// patch is then stopped at the sight surface through the separating cell
/// edge. Cuts run in ascending segment-id order.
inline SceneModel assemble(std::vector<SceneInput> inputs, const ViewingGeometry& viewing,
                           std::optional<Box3> box = std::nullopt, const Tolerances& tol = {}) {
  std::sort(inputs.begin(), inputs.end(),
            [](const SceneInput& a, const SceneInput& b) { return a.estimate.segment_id < b.estimate.segment_id; });
  SceneModel scene;
  scene.viewing = viewing;

  double ls_min = 0.0;
  for (const auto& in : inputs) {
    ScenePlane sp;
    sp.segment_id = in.estimate.segment_id;
    sp.plane = place_plane(in.estimate, viewing);
    sp.cell = in.clip_polygon;
    try {
      sp.base_patch = back_project(in.clip_polygon, sp.plane, viewing);
    } catch (const Error& e) {
      scene.issues.push_back({sp.segment_id, e.code(), e.what()});
      continue;
    }
    ls_min = ls_min == 0.0 ? in.estimate.ls : std::min(ls_min, in.estimate.ls);
    scene.planes.push_back(std::move(sp));
  }

  if (box) {
    scene.box = *box;
  } else {
    std::vector<std::vector<Vec3>> patches;
    for (const auto& sp : scene.planes) patches.push_back(sp.base_patch);
    scene.box = default_box(patches, ls_min, viewing);
  }
  const Box3& bx = scene.box;
  const double scale = bx.diagonal();
  const double merge_eps = 1e-12 * scale;
  const double side_eps = 1e-9 * scale;

  std::vector<detail::TaggedRing> rings(scene.planes.size());
  for (std::size_t i = 0; i < scene.planes.size(); ++i) {
    const Plane3& pl = scene.planes[i].plane;
    const Vec3 n = pl.normal;
    const Vec3 helper = std::abs(n.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    const Vec3 u1 = normalized(cross(n, helper));
    const Vec3 u2 = cross(n, u1);
    const double r = 4.0 * scale + distance(pl.anchor, bx.center());
    detail::TaggedRing ring;
    ring.pts = {pl.anchor + r * u1 + r * u2, pl.anchor - r * u1 + r * u2, pl.anchor - r * u1 - r * u2,
                pl.anchor + r * u1 - r * u2};
    ring.tags.assign(4, EdgeTag{});
    const EdgeTag box_tag{Trim::box, -1};
    ring = detail::clip_ring(ring, {1, 0, 0}, bx.hi.x, box_tag, merge_eps);
    ring = detail::clip_ring(ring, {-1, 0, 0}, -bx.lo.x, box_tag, merge_eps);
    ring = detail::clip_ring(ring, {0, 1, 0}, bx.hi.y, box_tag, merge_eps);
    ring = detail::clip_ring(ring, {0, -1, 0}, -bx.lo.y, box_tag, merge_eps);
    ring = detail::clip_ring(ring, {0, 0, 1}, bx.hi.z, box_tag, merge_eps);
    ring = detail::clip_ring(ring, {0, 0, -1}, -bx.lo.z, box_tag, merge_eps);
    rings[i] = std::move(ring);
  }

  // shared Voronoi edges
  const double adj_eps = 1e-6 * std::hypot(viewing.picture_center.x, viewing.picture_center.y);
  for (std::size_t i = 0; i < scene.planes.size(); ++i) {
    for (std::size_t j = i + 1; j < scene.planes.size(); ++j) {
      const ScenePlane& a = scene.planes[i];
      const ScenePlane& b = scene.planes[j];
      if (!detail::cells_adjacent(a.cell, b.cell, adj_eps)) continue;
      if (norm(cross(a.plane.normal, b.plane.normal)) < tol.par) continue;
      auto cut = [&](std::size_t self, const ScenePlane& other) {
        bool pos = false, neg = false;
        for (const auto& p : scene.planes[self].base_patch) {
          const double s = other.plane.eval(p);
          if (s > side_eps) pos = true;
          if (s < -side_eps) neg = true;
        }
        if (pos == neg) return;  // straddles the line, or lies on it
        const EdgeTag tag{Trim::plane_intersection, other.segment_id};
        const Vec3 m = pos ? -other.plane.normal : other.plane.normal;
        const double e = pos ? -other.plane.offset() : other.plane.offset();
        rings[self] = detail::clip_ring(rings[self], m, e, tag, merge_eps);
      };
      cut(i, b);
      cut(j, a);
    }
  }

  // sight boundaries of occluding planes
  for (std::size_t i = 0; i < scene.planes.size(); ++i) {
    for (std::size_t j = 0; j < scene.planes.size(); ++j) {
      if (i == j || rings[i].pts.size() < 3) continue;
      const ScenePlane& occ = scene.planes[i];
      const ScenePlane& hid = scene.planes[j];
      Vec3 centroid{};
      for (const auto& p : hid.base_patch) centroid = centroid + p;
      centroid = (1.0 / static_cast<double>(hid.base_patch.size())) * centroid;
      std::vector<Vec3> probes{centroid};
      for (const auto& p : hid.base_patch) probes.push_back(lerp(p, centroid, 0.01));
      bool hides = false;
      for (const auto& probe : probes) {
        const double denom = dot(occ.plane.normal, probe);
        if (std::abs(denom) <= 1e-12 * norm(probe)) continue;
        const double t = occ.plane.offset() / denom;
        if (!(t > 0.0 && t < 1.0 - 1e-9)) continue;
        if (detail::point_in_planar_polygon(rings[i].pts, occ.plane.normal, t * probe, side_eps)) {
          hides = true;
          break;
        }
      }
      if (!hides) continue;
      auto sep = detail::separating_edge(occ.cell, hid.cell, adj_eps);
      if (!sep) sep = detail::separating_edge(hid.cell, occ.cell, adj_eps);
      if (!sep) continue;
      const Vec3 m = cross(sight_point(sep->a, viewing), sight_point(sep->b, viewing));
      const Vec3 inside = sight_point(occ.cell.centroid(), viewing);
      const Vec3 keep = dot(m, inside) > 0.0 ? -m : m;
      rings[i] = detail::clip_ring(rings[i], normalized(keep), 0.0, {Trim::sight_boundary, hid.segment_id}, merge_eps);
    }
  }

  std::vector<ScenePlane> kept;
  for (std::size_t i = 0; i < scene.planes.size(); ++i) {
    if (rings[i].pts.size() < 3) {
      scene.issues.push_back({scene.planes[i].segment_id, ErrorCode::EmptyBoundary, "plane clipped away"});
      continue;
    }
    scene.planes[i].boundary = std::move(rings[i].pts);
    scene.planes[i].provenance = std::move(rings[i].tags);
    kept.push_back(std::move(scene.planes[i]));
  }
  scene.planes = std::move(kept);
  return scene;
}

/// Wavefront text: a header with seed and iteration, `v` lines with six
/// decimals in plane then boundary order, one `f` line per plane.
inline std::string export_obj(const SceneModel& scene) {
  std::string out = "# texinv scene\n# seed " + std::to_string(scene.seed) + " iteration " +
                    std::to_string(scene.iteration) + "\n";
  std::size_t next = 1;
  char buf[128];
  for (const auto& sp : scene.planes) {
    std::string face = "f";
    for (const auto& p : sp.boundary) {
      std::snprintf(buf, sizeof buf, "v %.6f %.6f %.6f\n", p.x, p.y, p.z);
      out += buf;
      face += " " + std::to_string(next++);
    }
    out += face + "\n";
  }
  return out;
}

}  // namespace texinv
