#pragma once

#include <array>
#include <limits>
#include <optional>
#include <vector>

#include "texinv/polygon.hpp"

namespace texinv {

enum class Role : std::size_t { L0 = 0, L1, L2, L3, L4, L5 };

/// Roles of a cell's edges for texture construction.
///
/// `polygon` is the ring the indices refer to: the cell itself, or for a
/// triangle the quadrilateral obtained by offsetting its longest edge through
/// the opposite vertex (`synthesized` is then set). L0..L3 hold one edge
/// each; L4 and L5 hold the leftover connected chains, possibly empty.
struct EdgeRoles {
  std::vector<Point2> polygon;
  bool synthesized = false;
  std::array<std::vector<std::size_t>, 6> edges;

  const std::vector<std::size_t>& of(Role r) const { return edges[static_cast<std::size_t>(r)]; }

  std::size_t index(Role r) const { return of(r).at(0); }

  Segment2 segment(Role r) const {
    const std::size_t i = index(r);
    return {polygon[i], polygon[(i + 1) % polygon.size()]};
  }

  friend bool operator==(const EdgeRoles&, const EdgeRoles&) = default;
};

namespace detail {

// (+,+) < (+,-) < (-,+) < (-,-), then lexicographic midpoint.
inline bool tie_break_less(Point2 ma, Point2 mb, Point2 center, double eps) {
  auto rank = [&](Point2 m) {
    const bool px = m.x - center.x >= -eps;
    const bool py = m.y - center.y >= -eps;
    return (px ? 0 : 2) + (py ? 0 : 1);
  };
  const int ra = rank(ma), rb = rank(mb);
  if (ra != rb) return ra < rb;
  if (ma.x != mb.x) return ma.x < mb.x;
  return ma.y < mb.y;
}

inline std::size_t cyclic_gap(std::size_t i, std::size_t j, std::size_t n) {
  const std::size_t d = i > j ? i - j : j - i;
  return std::min(d, n - d);
}

inline Segment2 ring_edge(const std::vector<Point2>& ring, std::size_t i) {
  return {ring[i], ring[(i + 1) % ring.size()]};
}

// Lowest score wins; scores within score_tol of the best are ties.
template <class Score>
std::optional<std::size_t> select_edge(const std::vector<Point2>& ring, const std::vector<std::size_t>& candidates,
                                       Score&& score, double score_tol, Point2 center, double eps) {
  if (candidates.empty()) return std::nullopt;
  double best = std::numeric_limits<double>::infinity();
  for (auto c : candidates) best = std::min(best, score(c));
  std::optional<std::size_t> pick;
  for (auto c : candidates) {
    if (score(c) > best + score_tol) continue;
    if (!pick || tie_break_less(ring_edge(ring, c).mid(), ring_edge(ring, *pick).mid(), center, eps)) pick = c;
  }
  return pick;
}

inline double line_angle(Segment2 s, Segment2 t) {
  const Point2 a = s.b - s.a;
  const Point2 b = t.b - t.a;
  return std::atan2(std::abs(cross(a, b)), std::abs(dot(a, b)));
}

}  // namespace detail

/// Assigns L0..L5 on a convex cell. Selection is a pure function of the
/// cell and the picture center, so repeated calls agree exactly.
inline EdgeRoles select_texture_edges(const ConvexPolygon2& cell, Point2 picture_center, const Tolerances& tol = {}) {
  using detail::cyclic_gap;
  using detail::ring_edge;

  EdgeRoles roles;
  roles.polygon = cell.vertices();
  double max_len = 0.0;
  for (std::size_t i = 0; i < cell.size(); ++i) max_len = std::max(max_len, cell.edge(i).length());
  const double len_tol = 1e-9 * max_len;
  const double eps = 1e-12 * max_len;

  auto neg_len = [&](std::size_t i) { return -ring_edge(roles.polygon, i).length(); };

  std::vector<std::size_t> all(cell.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const std::size_t l0_cell = *detail::select_edge(roles.polygon, all, neg_len, len_tol, picture_center, eps);

  std::size_t l0 = l0_cell, l1 = 0;
  if (cell.size() == 3) {
    // offset the longest edge through the opposite vertex
    const Segment2 e = cell.edge(l0_cell);
    const Point2 apex = cell[(l0_cell + 2) % 3];
    const Line2 carrier = Line2::through(e.a, e.b);
    const Point2 offset = apex - carrier.project(apex);
    roles.polygon = {e.a, e.b, e.b + offset, e.a + offset};
    roles.synthesized = true;
    l0 = 0;
    l1 = 2;
  } else {
    std::vector<std::size_t> opposed;
    for (std::size_t i = 0; i < cell.size(); ++i)
      if (cyclic_gap(i, l0, cell.size()) >= 2) opposed.push_back(i);
    const Segment2 s0 = ring_edge(roles.polygon, l0);
    l1 = *detail::select_edge(
        roles.polygon, opposed, [&](std::size_t i) { return detail::line_angle(s0, ring_edge(roles.polygon, i)); },
        tol.par, picture_center, eps);
  }

  const std::size_t n = roles.polygon.size();
  std::vector<std::size_t> connected;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == l0 || i == l1) continue;
    if (cyclic_gap(i, l0, n) == 1 || cyclic_gap(i, l1, n) == 1) connected.push_back(i);
  }
  auto l2 = detail::select_edge(roles.polygon, connected, neg_len, len_tol, picture_center, eps);
  if (!l2) throw Error(ErrorCode::DegenerateRoles, "no edge connected to L0/L1");

  std::vector<std::size_t> opposed2;
  for (std::size_t i = 0; i < n; ++i)
    if (i != l0 && i != l1 && cyclic_gap(i, *l2, n) >= 2) opposed2.push_back(i);
  const Segment2 s2 = ring_edge(roles.polygon, *l2);
  auto l3 = detail::select_edge(
      roles.polygon, opposed2, [&](std::size_t i) { return detail::line_angle(s2, ring_edge(roles.polygon, i)); },
      tol.par, picture_center, eps);
  if (!l3) throw Error(ErrorCode::DegenerateRoles, "no edge opposed to L2");

  roles.edges[0] = {l0};
  roles.edges[1] = {l1};
  roles.edges[2] = {*l2};
  roles.edges[3] = {*l3};

  // leftover runs in traversal order after L0; the first is L4, the rest L5
  std::vector<std::vector<std::size_t>> runs;
  bool in_run = false;
  for (std::size_t k = 1; k < n; ++k) {
    const std::size_t i = (l0 + k) % n;
    const bool used = i == l1 || i == *l2 || i == *l3;
    if (used) {
      in_run = false;
      continue;
    }
    if (!in_run) runs.emplace_back();
    runs.back().push_back(i);
    in_run = true;
  }
  if (!runs.empty()) roles.edges[4] = runs[0];
  for (std::size_t r = 1; r < runs.size(); ++r)
    roles.edges[5].insert(roles.edges[5].end(), runs[r].begin(), runs[r].end());
  return roles;
}

/// L2 and L3 oriented so each starts at its endpoint on the L0 side of the
/// cell boundary.
struct BandFrame {
  Segment2 l2;
  Segment2 l3;

  Point2 origin() const { return midpoint(l2.a, l3.a); }
};

inline BandFrame band_frame(const EdgeRoles& roles) {
  const auto& v = roles.polygon;
  const std::size_t n = v.size();
  const std::size_t i0 = roles.index(Role::L0);
  const std::size_t i2 = roles.index(Role::L2);
  const std::size_t i3 = roles.index(Role::L3);
  bool l0_between = false;  // on the arc running from L2 forward to L3
  for (std::size_t i = (i2 + 1) % n; i != i3; i = (i + 1) % n)
    if (i == i0) l0_between = true;
  BandFrame frame;
  if (l0_between) {
    frame.l2 = {v[(i2 + 1) % n], v[i2]};
    frame.l3 = {v[i3], v[(i3 + 1) % n]};
  } else {
    frame.l2 = {v[i2], v[(i2 + 1) % n]};
    frame.l3 = {v[(i3 + 1) % n], v[i3]};
  }
  return frame;
}

}  // namespace texinv
