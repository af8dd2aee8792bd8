#pragma once

#include <vector>

#include "texinv/polygon.hpp"

namespace texinv {

/// Voronoi diagram closed by a ring of outer sites. `sites` holds the
/// interior sites followed by the outer ones; `cells[i]` belongs to sites[i]
/// for every interior i. Outer cells are unbounded and not stored.
struct VoronoiDiagram {
  std::vector<Point2> sites;
  std::size_t interior_count = 0;
  std::vector<ConvexPolygon2> cells;

  friend bool operator==(const VoronoiDiagram&, const VoronoiDiagram&) = default;
};

/// Builds each interior cell by intersecting the half-planes
/// |x - s| <= |x - t| over every other site t, starting from a frame far
/// larger than the site cloud. A cell still touching the frame is unbounded.
inline VoronoiDiagram voronoi_closed(const std::vector<Point2>& interior_sites, const std::vector<Point2>& outer_sites,
                                     const Tolerances& tol = {}) {
  if (outer_sites.size() != 8) throw Error(ErrorCode::InvalidArgument, "expected exactly 8 outer sites");

  VoronoiDiagram diagram;
  diagram.sites = interior_sites;
  diagram.sites.insert(diagram.sites.end(), outer_sites.begin(), outer_sites.end());
  diagram.interior_count = interior_sites.size();

  const auto& sites = diagram.sites;
  for (std::size_t i = 0; i < sites.size(); ++i)
    for (std::size_t j = i + 1; j < sites.size(); ++j)
      if (distance(sites[i], sites[j]) <= tol.dist)
        throw Error(ErrorCode::DegenerateSites, "sites " + std::to_string(i) + " and " + std::to_string(j) + " coincide");

  Point2 lo = sites.front();
  Point2 hi = sites.front();
  for (const auto& s : sites) {
    lo = {std::min(lo.x, s.x), std::min(lo.y, s.y)};
    hi = {std::max(hi.x, s.x), std::max(hi.y, s.y)};
  }
  const double pad = 4.0 * std::max(hi.x - lo.x, hi.y - lo.y) + 1.0;
  const Point2 frame_lo{lo.x - pad, lo.y - pad};
  const Point2 frame_hi{hi.x + pad, hi.y + pad};
  const double frame_eps = 1e-6 * pad;

  diagram.cells.reserve(interior_sites.size());
  for (std::size_t i = 0; i < interior_sites.size(); ++i) {
    const Point2 s = sites[i];
    std::vector<Point2> ring = {frame_lo, {frame_hi.x, frame_lo.y}, frame_hi, {frame_lo.x, frame_hi.y}};
    for (std::size_t j = 0; j < sites.size(); ++j) {
      if (j == i) continue;
      const Point2 t = sites[j];
      const Point2 d = t - s;
      // s's side of the perpendicular bisector of s and t
      const Point2 m = midpoint(s, t);
      const Point2 dn = normalized(d);
      ring = clip_ring(ring, [&](Point2 p) { return -dot(dn, p - m); });
    }
    for (const auto& p : ring) {
      if (std::abs(p.x - frame_lo.x) < frame_eps || std::abs(p.x - frame_hi.x) < frame_eps ||
          std::abs(p.y - frame_lo.y) < frame_eps || std::abs(p.y - frame_hi.y) < frame_eps)
        throw Error(ErrorCode::UnboundedCell, "cell of interior site " + std::to_string(i) + " is not closed");
    }
    auto cell = ConvexPolygon2::try_from_points(std::move(ring), tol);
    if (!cell) throw Error(ErrorCode::DegenerateSites, "empty cell for interior site " + std::to_string(i));
    diagram.cells.push_back(std::move(*cell));
  }
  return diagram;
}

}  // namespace texinv
