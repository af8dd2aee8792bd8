#pragma once

// Reference computations written independently of the library.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "texinv/geometry.hpp"

namespace oracle {

using texinv::Point2;

struct Nearest {
  std::size_t index = 0;
  double best = 0.0;
  double second = 0.0;
};

inline Nearest nearest_site(const std::vector<Point2>& sites, Point2 p) {
  Nearest n{0, std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const double d = std::hypot(sites[i].x - p.x, sites[i].y - p.y);
    if (d < n.best) {
      n.second = n.best;
      n.best = d;
      n.index = i;
    } else if (d < n.second) {
      n.second = d;
    }
  }
  return n;
}

inline double shoelace(const std::vector<Point2>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2 a = v[i], b = v[(i + 1) % v.size()];
    s += a.x * b.y - b.x * a.y;
  }
  return 0.5 * s;
}

// Winding-free inside test for a counterclockwise convex ring.
inline bool inside_ccw(const std::vector<Point2>& v, Point2 p, double eps) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2 a = v[i], b = v[(i + 1) % v.size()];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    if (((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)) / len < -eps) return false;
  }
  return true;
}

inline double point_line_distance(double a, double b, double c, Point2 p) {
  return std::abs(a * p.x + b * p.y + c) / std::hypot(a, b);
}

inline Point2 rotate_about(Point2 p, Point2 c, double theta) {
  const double s = std::sin(theta), k = std::cos(theta);
  const double dx = p.x - c.x, dy = p.y - c.y;
  return {c.x + k * dx - s * dy, c.y + s * dx + k * dy};
}

}  // namespace oracle
