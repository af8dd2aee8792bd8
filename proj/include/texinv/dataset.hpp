#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "texinv/json_io.hpp"
#include "texinv/picture.hpp"

namespace texinv {

inline constexpr int kSchemaVersion = 1;

// ---- encoding -------------------------------------------------------------

inline Json to_json(Point2 p) { return Json::array({p.x, p.y}); }

inline Json to_json(const std::vector<Point2>& pts) {
  Json a = Json::array();
  for (const auto& p : pts) a.push_back(to_json(p));
  return a;
}

inline Json to_json(const ConvexPolygon2& poly) { return to_json(poly.vertices()); }

inline Json to_json(const Line2& l) { return Json::array({l.a(), l.b(), l.c()}); }

inline Json to_json(const ProjectivePoint2& p) {
  if (p.is_finite()) return {{"kind", "finite"}, {"x", p.position().x}, {"y", p.position().y}};
  return {{"kind", "infinite"}, {"dx", p.direction().x}, {"dy", p.direction().y}};
}

inline Json to_json(const GenConfig& c) {
  return {{"width", c.width},
          {"height", c.height},
          {"inset_ratio", c.inset_ratio},
          {"generative_ratio", c.generative_ratio},
          {"min_site_offset", c.min_site_offset},
          {"f_min", c.f_min},
          {"f_max", c.f_max},
          {"background_luminance", c.background_luminance},
          {"eye_distance", c.eye_distance}};
}

inline Json to_json(const EdgeRoles& r) {
  Json j = {{"polygon", to_json(r.polygon)}, {"synthesized", r.synthesized}};
  for (std::size_t k = 0; k < 6; ++k) j["L" + std::to_string(k)] = r.edges[k];
  return j;
}

inline Json to_json(const TextureSegment& s) {
  Json lines = Json::array();
  for (const auto& l : s.band_lines) lines.push_back(to_json(l));
  return {{"id", s.id},
          {"created_at", s.created_at},
          {"creation_polygon", to_json(s.creation_polygon)},
          {"roles", to_json(s.roles)},
          {"f", s.f},
          {"O", s.order},
          {"band_lines", lines},
          {"clip_polygon", to_json(s.clip_polygon)}};
}

/// One dataset record: the full state of a sequence at one iteration.
inline Json to_json(const SequenceState& s) {
  Json segs = Json::array();
  for (const auto& seg : s.segments) segs.push_back(to_json(seg));
  return {{"schema_version", kSchemaVersion},
          {"seed", s.token.seed},
          {"iteration", s.token.iteration},
          {"config", to_json(s.config)},
          {"outer_sites", to_json(s.outer_sites)},
          {"interior_sites", to_json(s.interior_sites)},
          {"segments", segs}};
}

inline std::string save_record(const SequenceState& s) { return dump_record(to_json(s)); }

// ---- decoding -------------------------------------------------------------

namespace detail {

[[noreturn]] inline void schema_error(const std::string& what) { throw Error(ErrorCode::SchemaMismatch, what); }

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) schema_error(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline double number(const Json& j) {
  if (!j.is_number()) schema_error("expected a number");
  return j.get<double>();
}

inline int integer(const Json& j) {
  if (!j.is_number_integer()) schema_error("expected an integer");
  return j.get<int>();
}

}  // namespace detail

inline Point2 point_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) detail::schema_error("point must be [x, y]");
  return {detail::number(j[0]), detail::number(j[1])};
}

inline std::vector<Point2> points_from_json(const Json& j) {
  if (!j.is_array()) detail::schema_error("expected a point list");
  std::vector<Point2> out;
  for (const auto& p : j) out.push_back(point_from_json(p));
  return out;
}

inline ConvexPolygon2 polygon_from_json(const Json& j, const Tolerances& tol) {
  try {
    return ConvexPolygon2::from_clean_points(points_from_json(j), tol);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidPolygon) throw Error(ErrorCode::CorruptRecord, e.what());
    throw;
  }
}

inline Line2 line_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) detail::schema_error("line must be [a, b, c]");
  try {
    return Line2::from_canonical(detail::number(j[0]), detail::number(j[1]), detail::number(j[2]));
  } catch (const Error& e) {
    throw Error(ErrorCode::CorruptRecord, e.what());
  }
}

inline ProjectivePoint2 projective_from_json(const Json& j) {
  const auto& kind = detail::field(j, "kind");
  if (kind == "finite") return ProjectivePoint2::finite({detail::number(detail::field(j, "x")), detail::number(detail::field(j, "y"))});
  if (kind == "infinite")
    return ProjectivePoint2::at_infinity_exact(
        {detail::number(detail::field(j, "dx")), detail::number(detail::field(j, "dy"))});
  detail::schema_error("unknown projective point kind");
}

inline GenConfig config_from_json(const Json& j, GenConfig base = {}) {
  using detail::integer;
  using detail::number;
  if (!j.is_object()) detail::schema_error("config must be an object");
  if (j.contains("width")) base.width = integer(j["width"]);
  if (j.contains("height")) base.height = integer(j["height"]);
  if (j.contains("inset_ratio")) base.inset_ratio = number(j["inset_ratio"]);
  if (j.contains("generative_ratio")) base.generative_ratio = number(j["generative_ratio"]);
  if (j.contains("min_site_offset")) base.min_site_offset = number(j["min_site_offset"]);
  if (j.contains("f_min")) base.f_min = integer(j["f_min"]);
  if (j.contains("f_max")) base.f_max = integer(j["f_max"]);
  if (j.contains("background_luminance")) base.background_luminance = integer(j["background_luminance"]);
  if (j.contains("eye_distance")) base.eye_distance = number(j["eye_distance"]);
  return base;
}

inline EdgeRoles roles_from_json(const Json& j) {
  EdgeRoles r;
  r.polygon = points_from_json(detail::field(j, "polygon"));
  const auto& syn = detail::field(j, "synthesized");
  if (!syn.is_boolean()) detail::schema_error("synthesized must be boolean");
  r.synthesized = syn.get<bool>();
  for (std::size_t k = 0; k < 6; ++k) {
    const std::string key = "L" + std::to_string(k);
    const auto& idx = detail::field(j, key.c_str());
    if (!idx.is_array()) detail::schema_error(key + " must be an index list");
    for (const auto& i : idx) {
      if (!i.is_number_unsigned() || i.get<std::size_t>() >= r.polygon.size())
        throw Error(ErrorCode::CorruptRecord, key + " index out of range");
      r.edges[k].push_back(i.get<std::size_t>());
    }
    if (k < 4 && r.edges[k].size() != 1) throw Error(ErrorCode::CorruptRecord, key + " must name one edge");
  }
  return r;
}

inline TextureSegment segment_from_json(const Json& j, const Tolerances& tol) {
  TextureSegment s;
  s.id = detail::integer(detail::field(j, "id"));
  s.created_at = detail::integer(detail::field(j, "created_at"));
  s.creation_polygon = polygon_from_json(detail::field(j, "creation_polygon"), tol);
  s.roles = roles_from_json(detail::field(j, "roles"));
  s.f = detail::integer(detail::field(j, "f"));
  s.order = detail::integer(detail::field(j, "O"));
  const auto& lines = detail::field(j, "band_lines");
  if (!lines.is_array()) detail::schema_error("band_lines must be a list");
  for (const auto& l : lines) s.band_lines.push_back(line_from_json(l));
  s.clip_polygon = polygon_from_json(detail::field(j, "clip_polygon"), tol);
  if (s.band_lines.size() != static_cast<std::size_t>(2 * s.f - 1) || (s.order != 0 && s.order != 1))
    throw Error(ErrorCode::CorruptRecord, "segment band data inconsistent with f/O");
  return s;
}

inline SequenceState state_from_json(const Json& j) {
  const auto& version = detail::field(j, "schema_version");
  if (!version.is_number_integer() || version.get<int>() != kSchemaVersion)
    detail::schema_error("unsupported schema_version");
  SequenceState s;
  const auto& seed = detail::field(j, "seed");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0))
    detail::schema_error("seed must be an unsigned integer");
  s.token.seed = seed.get<std::uint64_t>();
  s.token.iteration = detail::integer(detail::field(j, "iteration"));
  s.config = config_from_json(detail::field(j, "config"));
  try {
    s.config.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::CorruptRecord, e.what());
  }
  const Tolerances tol = s.config.tolerances();
  s.outer_sites = points_from_json(detail::field(j, "outer_sites"));
  s.interior_sites = points_from_json(detail::field(j, "interior_sites"));
  const auto& segs = detail::field(j, "segments");
  if (!segs.is_array()) detail::schema_error("segments must be a list");
  for (const auto& seg : segs) s.segments.push_back(segment_from_json(seg, tol));

  if (s.outer_sites.size() != 8 || s.interior_sites.size() != static_cast<std::size_t>(s.token.iteration) ||
      s.segments.size() != s.interior_sites.size())
    throw Error(ErrorCode::CorruptRecord, "site or segment counts disagree with iteration");
  try {
    s.diagram = voronoi_closed(s.interior_sites, s.outer_sites, tol);
  } catch (const Error& e) {
    throw Error(ErrorCode::CorruptRecord, e.what());
  }
  for (std::size_t i = 0; i < s.segments.size(); ++i)
    if (!(s.segments[i].clip_polygon == s.diagram.cells[i]))
      throw Error(ErrorCode::CorruptRecord, "clip polygon of segment " + std::to_string(i) + " is not its cell");
  return s;
}

inline SequenceState load_record(const std::string& line) { return state_from_json(parse_record(line)); }

/// Reads a newline-delimited dataset; blank lines are skipped.
inline std::vector<SequenceState> read_dataset(std::istream& in) {
  std::vector<SequenceState> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(load_record(line));
  }
  return out;
}

inline std::vector<SequenceState> read_dataset_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open dataset " + path);
  return read_dataset(in);
}

/// Appends one record per line.
inline void append_record(std::ostream& out, const SequenceState& s) { out << save_record(s) << '\n'; }

/// States at iterations 0..iterations of one seeded sequence.
inline std::vector<SequenceState> generate_lineage(const GenConfig& config, std::uint64_t seed, int iterations) {
  if (iterations < 0) throw Error(ErrorCode::InvalidArgument, "iterations must be non-negative");
  std::vector<SequenceState> out{init_sequence(config, seed)};
  for (int k = 0; k < iterations; ++k) out.push_back(step(out.back()));
  return out;
}

inline std::string dataset_text(const std::vector<SequenceState>& states) {
  std::ostringstream out;
  for (const auto& s : states) append_record(out, s);
  return out.str();
}

}  // namespace texinv
