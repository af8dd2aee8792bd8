#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "texinv/dataset.hpp"
#include "texinv/scene.hpp"

namespace texinv {

inline Json to_json(const ViewingGeometry& v) {
  return {{"eye_distance", v.eye_distance},
          {"reference_length", v.reference_length},
          {"picture_center", to_json(v.picture_center)}};
}

inline Json to_json(const PlaneEstimate& e) {
  return {{"segment_id", e.segment_id},
          {"v1", to_json(e.v1)},
          {"v2", to_json(e.v2)},
          {"v3", to_json(e.v3)},
          {"b0", to_json(e.b0)},
          {"b1", to_json(e.b1)},
          {"alpha", e.alpha},
          {"beta", e.beta},
          {"p", e.p},
          {"q", e.q},
          {"slant", e.slant},
          {"tilt", e.tilt},
          {"ls", e.ls},
          {"d1", e.d1},
          {"center_fallback", e.center_fallback}};
}

inline Json to_json(Vec3 v) { return Json::array({v.x, v.y, v.z}); }

inline Json to_json(const std::vector<Vec3>& pts) {
  Json a = Json::array();
  for (const auto& p : pts) a.push_back(to_json(p));
  return a;
}

inline Json to_json(const Plane3& p) { return {{"normal", to_json(p.normal)}, {"anchor", to_json(p.anchor)}}; }

/// Estimates of every segment of one state, with the clip polygons the
/// scene needs.
struct EstimateSet {
  std::uint64_t seed = 0;
  int iteration = 0;
  ViewingGeometry viewing;
  std::vector<SceneInput> inputs;
  std::vector<SceneIssue> failures;  // segments the inverse rejected
};

inline EstimateSet estimate_state(const SequenceState& state, const ViewingGeometry& viewing) {
  EstimateSet out;
  out.seed = state.token.seed;
  out.iteration = state.token.iteration;
  out.viewing = viewing;
  const Tolerances tol = state.config.tolerances();
  for (const auto& seg : state.segments) {
    try {
      out.inputs.push_back({estimate_plane(seg, viewing, tol), seg.clip_polygon});
    } catch (const Error& e) {
      out.failures.push_back({seg.id, e.code(), e.what()});
    }
  }
  return out;
}

inline Json to_json(const EstimateSet& s) {
  Json segs = Json::array();
  for (const auto& in : s.inputs) {
    Json j = to_json(in.estimate);
    j["clip_polygon"] = to_json(in.clip_polygon);
    segs.push_back(std::move(j));
  }
  Json fails = Json::array();
  for (const auto& f : s.failures) fails.push_back({{"segment_id", f.segment_id}, {"error", to_string(f.code)}});
  return {{"schema_version", kSchemaVersion}, {"seed", s.seed},         {"iteration", s.iteration},
          {"viewing", to_json(s.viewing)},    {"estimates", segs},      {"failures", fails}};
}

inline std::string save_estimates(const EstimateSet& s) { return dump_record(to_json(s)); }

inline ViewingGeometry viewing_from_json(const Json& j) {
  ViewingGeometry v;
  v.eye_distance = detail::number(detail::field(j, "eye_distance"));
  v.reference_length = detail::number(detail::field(j, "reference_length"));
  v.picture_center = point_from_json(detail::field(j, "picture_center"));
  if (!(v.eye_distance > 0.0) || !(v.reference_length > 0.0))
    throw Error(ErrorCode::CorruptRecord, "viewing distances must be positive");
  return v;
}

inline PlaneEstimate estimate_from_json(const Json& j) {
  using detail::field;
  using detail::number;
  PlaneEstimate e;
  e.segment_id = detail::integer(field(j, "segment_id"));
  e.v1 = point_from_json(field(j, "v1"));
  e.v2 = projective_from_json(field(j, "v2"));
  e.v3 = projective_from_json(field(j, "v3"));
  e.b0 = line_from_json(field(j, "b0"));
  e.b1 = line_from_json(field(j, "b1"));
  e.alpha = number(field(j, "alpha"));
  e.beta = number(field(j, "beta"));
  e.p = number(field(j, "p"));
  e.q = number(field(j, "q"));
  e.slant = number(field(j, "slant"));
  e.tilt = number(field(j, "tilt"));
  e.ls = number(field(j, "ls"));
  e.d1 = number(field(j, "d1"));
  const auto& fb = field(j, "center_fallback");
  if (!fb.is_boolean()) detail::schema_error("center_fallback must be boolean");
  e.center_fallback = fb.get<bool>();
  return e;
}

inline EstimateSet estimates_from_json(const Json& j) {
  const auto& version = detail::field(j, "schema_version");
  if (!version.is_number_integer() || version.get<int>() != kSchemaVersion)
    detail::schema_error("unsupported schema_version");
  EstimateSet s;
  s.seed = detail::field(j, "seed").get<std::uint64_t>();
  s.iteration = detail::integer(detail::field(j, "iteration"));
  s.viewing = viewing_from_json(detail::field(j, "viewing"));
  const Tolerances tol = Tolerances::for_picture(2.0 * s.viewing.picture_center.x, 2.0 * s.viewing.picture_center.y);
  const auto& list = detail::field(j, "estimates");
  if (!list.is_array()) detail::schema_error("estimates must be a list");
  for (const auto& e : list)
    s.inputs.push_back({estimate_from_json(e), polygon_from_json(detail::field(e, "clip_polygon"), tol)});
  return s;
}

inline EstimateSet load_estimates(const std::string& text) { return estimates_from_json(parse_record(text)); }

inline Json to_json(const SceneModel& scene) {
  Json planes = Json::array();
  for (const auto& sp : scene.planes) {
    Json tags = Json::array();
    for (const auto& t : sp.provenance) tags.push_back({{"kind", to_string(t.kind)}, {"partner", t.partner}});
    planes.push_back({{"segment_id", sp.segment_id},
                      {"plane", to_json(sp.plane)},
                      {"cell", to_json(sp.cell)},
                      {"base_patch", to_json(sp.base_patch)},
                      {"boundary", to_json(sp.boundary)},
                      {"trim_provenance", tags}});
  }
  Json issues = Json::array();
  for (const auto& i : scene.issues)
    issues.push_back({{"segment_id", i.segment_id}, {"error", to_string(i.code)}, {"message", i.message}});
  return {{"schema_version", kSchemaVersion},
          {"seed", scene.seed},
          {"iteration", scene.iteration},
          {"viewing", to_json(scene.viewing)},
          {"box", {{"lo", to_json(scene.box.lo)}, {"hi", to_json(scene.box.hi)}}},
          {"planes", planes},
          {"issues", issues}};
}

inline SceneModel assemble_estimates(const EstimateSet& set) {
  SceneModel scene = assemble(set.inputs, set.viewing);
  scene.seed = set.seed;
  scene.iteration = set.iteration;
  return scene;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::InvalidArgument, "failed writing " + path);
}

}  // namespace texinv
