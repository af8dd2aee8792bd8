#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "texinv/edge_roles.hpp"
#include "texinv/rng.hpp"
#include "texinv/voronoi.hpp"

namespace texinv {

/// Generator parameters. Lengths are in picture units (pixels), origin at
/// the top-left corner of the picture P_p = [0, W] x [0, H].
struct GenConfig {
  int width = 512;
  int height = 512;
  double inset_ratio = 0.1;        // margin of the site inset, fraction of min(W, H)
  double generative_ratio = 3.0;   // P_g extent relative to P_p
  double min_site_offset = 51.2;   // minimum spacing between sites
  int f_min = 1;
  int f_max = 10;
  int background_luminance = 255;
  double eye_distance = 512.0;     // D0

  static GenConfig for_size(int width, int height) {
    GenConfig c;
    c.width = width;
    c.height = height;
    c.min_site_offset = 0.1 * std::min(width, height);
    c.eye_distance = std::max(width, height);
    return c;
  }

  void validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
    if (width <= 0 || height <= 0) fail("picture size must be positive");
    if (!(inset_ratio > 0.0 && inset_ratio < 0.5)) fail("inset_ratio must lie in (0, 0.5)");
    if (!(generative_ratio > 1.0)) fail("generative_ratio must exceed 1");
    if (!(min_site_offset > 0.0)) fail("min_site_offset must be positive");
    if (f_min < 1 || f_min > f_max) fail("need 1 <= f_min <= f_max");
    if (background_luminance < 0 || background_luminance > 255) fail("background_luminance must be 0..255");
    if (!(eye_distance > 0.0)) fail("eye_distance must be positive");
  }

  Point2 center() const { return {0.5 * width, 0.5 * height}; }
  double inset_margin() const { return inset_ratio * std::min(width, height); }
  Tolerances tolerances() const { return Tolerances::for_picture(width, height); }

  friend bool operator==(const GenConfig&, const GenConfig&) = default;
};

struct SeedToken {
  std::uint64_t seed = 0;
  int iteration = 0;

  friend bool operator==(const SeedToken&, const SeedToken&) = default;
};

/// One grating patch. Everything except clip_polygon is fixed when the
/// segment is created and never changes afterwards.
struct TextureSegment {
  int id = 0;
  int created_at = 0;
  ConvexPolygon2 creation_polygon;
  EdgeRoles roles;
  int f = 1;
  int order = 0;  // luminance of the first band: 0 black, 1 white
  std::vector<Line2> band_lines;
  ConvexPolygon2 clip_polygon;

  friend bool operator==(const TextureSegment&, const TextureSegment&) = default;
};

struct SequenceState {
  GenConfig config;
  SeedToken token;
  std::vector<Point2> outer_sites;
  std::vector<Point2> interior_sites;
  VoronoiDiagram diagram;
  std::vector<TextureSegment> segments;

  friend bool operator==(const SequenceState&, const SequenceState&) = default;
};

struct Band {
  std::optional<ConvexPolygon2> polygon;  // part of the cell covered by the band
  std::uint8_t luminance = 0;
};

struct BandGeometry {
  BandFrame frame;
  std::vector<Line2> lines;
  std::vector<Band> bands;
};

inline std::uint8_t band_luminance(std::size_t band, int order) {
  return (band + static_cast<std::size_t>(order)) % 2 == 0 ? 0 : 255;
}

/// Index of the band containing p: the number of band lines separating p
/// from the L0-side origin of the frame.
inline std::size_t band_index(Point2 p, const std::vector<Line2>& lines, Point2 origin) {
  std::size_t k = 0;
  for (const auto& l : lines)
    if ((l.eval(p) >= 0.0) != (l.eval(origin) >= 0.0)) ++k;
  return k;
}

/// Splits L2 and L3 into 2f equal pieces and joins matching division points,
/// giving 2f - 1 band lines and 2f bands alternating from `order`.
inline BandGeometry generate_bands(const ConvexPolygon2& cell, const EdgeRoles& roles, int f, int order,
                                   const Tolerances& tol = {}) {
  if (f < 1) throw Error(ErrorCode::InvalidArgument, "band frequency must be >= 1");
  BandGeometry g;
  g.frame = band_frame(roles);
  if (g.frame.l2.length() < tol.dist || g.frame.l3.length() < tol.dist)
    throw Error(ErrorCode::DegenerateRoles, "L2 or L3 has zero length");

  const int count = 2 * f;
  for (int k = 1; k < count; ++k) {
    const double t = static_cast<double>(k) / count;
    g.lines.push_back(Line2::through(lerp(g.frame.l2.a, g.frame.l2.b, t), lerp(g.frame.l3.a, g.frame.l3.b, t)));
  }

  const Point2 origin = g.frame.origin();
  for (int k = 0; k < count; ++k) {
    std::optional<ConvexPolygon2> part = cell;
    if (k > 0) {
      const Line2& before = g.lines[k - 1];
      const double away = before.eval(origin) >= 0.0 ? -1.0 : 1.0;
      part = clip_polygon(*part, before, away, tol);
    }
    if (part && k + 1 < count) {
      const Line2& after = g.lines[k];
      const double toward = after.eval(origin) >= 0.0 ? 1.0 : -1.0;
      part = clip_polygon(*part, after, toward, tol);
    }
    g.bands.push_back({part, band_luminance(static_cast<std::size_t>(k), order)});
  }
  return g;
}

struct TextureParams {
  int f = 1;
  int order = 0;
};

/// Draws f then O from the stream.
inline TextureParams draw_texture_params(StreamRng& rng, int f_min = 1, int f_max = 10) {
  TextureParams p;
  p.f = rng.integer(f_min, f_max);
  p.order = rng.bit();
  return p;
}

/// The eight subdomains of P_g outside P_p, row-major from the top-left,
/// as (lo, hi) corner pairs.
inline std::vector<std::pair<Point2, Point2>> outer_subdomains(const GenConfig& c) {
  const double w = c.width, h = c.height;
  const double gx = 0.5 * w * (c.generative_ratio - 1.0);
  const double gy = 0.5 * h * (c.generative_ratio - 1.0);
  const double xs[4] = {-gx, 0.0, w, w + gx};
  const double ys[4] = {-gy, 0.0, h, h + gy};
  std::vector<std::pair<Point2, Point2>> out;
  for (int row = 0; row < 3; ++row)
    for (int col = 0; col < 3; ++col) {
      if (row == 1 && col == 1) continue;
      out.push_back({{xs[col], ys[row]}, {xs[col + 1], ys[row + 1]}});
    }
  return out;
}

inline SequenceState init_sequence(const GenConfig& config, std::uint64_t seed) {
  config.validate();
  SequenceState s;
  s.config = config;
  s.token = {seed, 0};
  StreamRng rng(seed, 0);
  for (const auto& [lo, hi] : outer_subdomains(config)) {
    const double x = rng.uniform(lo.x, hi.x);
    const double y = rng.uniform(lo.y, hi.y);
    s.outer_sites.push_back({x, y});
  }
  s.diagram = voronoi_closed({}, s.outer_sites, config.tolerances());
  return s;
}

inline constexpr int kMaxSiteAttempts = 10000;

/// Builds the texture segment for a freshly created cell.
inline TextureSegment make_segment(const GenConfig& config, int id, int created_at, const ConvexPolygon2& cell,
                                   TextureParams params) {
  const Tolerances tol = config.tolerances();
  TextureSegment seg;
  seg.id = id;
  seg.created_at = created_at;
  seg.creation_polygon = cell;
  seg.roles = select_texture_edges(cell, config.center(), tol);
  seg.f = params.f;
  seg.order = params.order;
  seg.band_lines = generate_bands(cell, seg.roles, params.f, params.order, tol).lines;
  seg.clip_polygon = cell;
  return seg;
}

/// Adds one interior site, re-clips existing segments to their new cells and
/// textures the new cell. Uses stream (seed, iteration + 1).
inline SequenceState step(const SequenceState& state) {
  const GenConfig& c = state.config;
  if (state.interior_sites.size() != static_cast<std::size_t>(state.token.iteration) ||
      state.segments.size() != state.interior_sites.size())
    throw Error(ErrorCode::InvalidArgument, "state is inconsistent with its iteration count");

  SequenceState next = state;
  next.token.iteration = state.token.iteration + 1;
  StreamRng rng(state.token.seed, static_cast<std::uint64_t>(next.token.iteration));

  const double m = c.inset_margin();
  std::optional<Point2> site;
  for (int attempt = 0; attempt < kMaxSiteAttempts && !site; ++attempt) {
    const double x = rng.uniform(m, c.width - m);
    const double y = rng.uniform(m, c.height - m);
    const Point2 p{x, y};
    bool ok = true;
    for (const auto& q : state.interior_sites) ok = ok && distance(p, q) >= c.min_site_offset;
    for (const auto& q : state.outer_sites) ok = ok && distance(p, q) >= c.min_site_offset;
    if (ok) site = p;
  }
  if (!site) throw Error(ErrorCode::SamplingExhausted, "no admissible site after 10000 attempts");
  const TextureParams params = draw_texture_params(rng, c.f_min, c.f_max);

  next.interior_sites.push_back(*site);
  next.diagram = voronoi_closed(next.interior_sites, next.outer_sites, c.tolerances());
  for (std::size_t i = 0; i < next.segments.size(); ++i) next.segments[i].clip_polygon = next.diagram.cells[i];
  next.segments.push_back(make_segment(c, static_cast<int>(next.segments.size()), next.token.iteration,
                                       next.diagram.cells.back(), params));
  return next;
}

/// State at `iteration` regenerated from the seed alone.
inline SequenceState generate(const GenConfig& config, std::uint64_t seed, int iteration) {
  SequenceState s = init_sequence(config, seed);
  for (int i = 0; i < iteration; ++i) s = step(s);
  return s;
}

}  // namespace texinv
