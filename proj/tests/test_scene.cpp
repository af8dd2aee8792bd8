#include <gtest/gtest.h>

#include <map>

#include "texinv/records.hpp"

using namespace texinv;

namespace {

const GenConfig kConfig;
const ViewingGeometry kView = ViewingGeometry::for_config(kConfig);
const double kD0 = kView.eye_distance;

PlaneEstimate flat_estimate(int id, Point2 v1, double d1, double ls) {
  PlaneEstimate e;
  e.segment_id = id;
  e.v1 = v1;
  e.d1 = d1;
  e.ls = ls;
  return e;
}

// point-in-convex-polygon on the plane, either winding
bool inside_planar(const std::vector<Vec3>& poly, Vec3 n, Vec3 p, double eps) {
  int pos = 0, neg = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec3 a = poly[i], b = poly[(i + 1) % poly.size()];
    const Vec3 e = b - a;
    const double s = dot(cross(e, p - a), n) / norm(e);
    if (s > eps) ++pos;
    if (s < -eps) ++neg;
  }
  return pos == 0 || neg == 0;
}

double line_residual(Vec3 a, Vec3 b, Vec3 p) { return norm(cross(b - a, p - a)) / norm(b - a); }

SceneModel seeded_scene(std::uint64_t seed, int iteration) {
  const SequenceState s = generate(kConfig, seed, iteration);
  return assemble_estimates(estimate_state(s, kView));
}

}  // namespace

TEST(PlacePlane, FrontoParallelOnThePicturePlane) {
  const Plane3 p = place_plane(flat_estimate(0, kView.picture_center, 0.0, 100.0), kView);
  EXPECT_EQ(p.normal, (Vec3{0, 0, 1}));
  EXPECT_NEAR(p.anchor.x, 0.0, 1e-12);
  EXPECT_NEAR(p.anchor.y, 0.0, 1e-12);
  EXPECT_NEAR(p.anchor.z, kD0, 1e-12);
}

TEST(PlacePlane, HalfReferenceLengthDoublesTheRay) {
  PlaneEstimate e = flat_estimate(0, kView.picture_center + Point2{100, 50}, 0.0, 0.5 * kView.reference_length);
  e.d1 = distance_from_reciprocity(e.ls, kView);
  e.p = 0.3;
  e.q = -0.2;
  const Plane3 p = place_plane(e, kView);
  // D1 = D0 beyond the picture point along its sight ray
  const double to_picture = std::hypot(100.0, 50.0, kD0);
  EXPECT_NEAR(norm(p.anchor), to_picture + kD0, 1e-9);
  EXPECT_NEAR(p.anchor.x / p.anchor.z, 100.0 / kD0, 1e-15);
  EXPECT_NEAR(p.anchor.y / p.anchor.z, 50.0 / kD0, 1e-15);
  EXPECT_NEAR(norm(p.normal), 1.0, 1e-15);
  EXPECT_NEAR(p.normal.x / p.normal.z, -0.3, 1e-15);
  EXPECT_NEAR(p.normal.y / p.normal.z, 0.2, 1e-15);
  // on the optical axis that is twice the picture-plane distance
  e.v1 = kView.picture_center;
  EXPECT_NEAR(place_plane(e, kView).anchor.z, 2.0 * kD0, 1e-12);
}

TEST(BackProject, FrontoParallelScalesAboutTheAxis) {
  const auto poly = ConvexPolygon2::from_points({{266, 276}, {356, 256}, {300, 350}});
  const Plane3 plane{{0, 0, 1}, {0, 0, 2.0 * kD0}};
  const auto out = back_project(poly, plane, kView);
  ASSERT_EQ(out.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    const Point2 c = kView.centered(poly.vertices()[i]);
    EXPECT_NEAR(out[i].x, 2.0 * c.x, 1e-12);
    EXPECT_NEAR(out[i].y, 2.0 * c.y, 1e-12);
    EXPECT_NEAR(out[i].z, 2.0 * kD0, 1e-12);
  }
}

TEST(BackProject, PicturePlaneIsIdentity) {
  const auto sq = ConvexPolygon2::rectangle({256, 256}, {257, 257});
  const auto out = back_project(sq, {{0, 0, 1}, {0, 0, kD0}}, kView);
  for (std::size_t i = 0; i < 4; ++i) {
    const Point2 c = kView.centered(sq.vertices()[i]);
    EXPECT_NEAR(out[i].x, c.x, 1e-12);
    EXPECT_NEAR(out[i].y, c.y, 1e-12);
    EXPECT_NEAR(out[i].z, kD0, 1e-12);
  }
}

TEST(BackProject, Errors) {
  const auto sq = ConvexPolygon2::rectangle({256, 250}, {262, 262});
  try {
    // the x = 256 vertices see along the plane x = 0 through the eye
    back_project(sq, {{1, 0, 0}, {0, 0, 0}}, kView);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RayParallelToPlane);
  }
  try {
    back_project(sq, {{0, 0, 1}, {0, 0, -kD0}}, kView);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BehindViewer);
  }
}

TEST(Assemble, SingleFrontoParallelPlaneIsABoxSection) {
  const auto cell = ConvexPolygon2::rectangle({206, 206}, {306, 306});
  const double to_picture = kD0;
  const Box3 box{{-500, -400, 100}, {500, 400, 3000}};
  const auto scene = assemble({{flat_estimate(3, kView.picture_center, to_picture, 100.0), cell}}, kView, box);
  ASSERT_EQ(scene.planes.size(), 1u);
  const auto& sp = scene.planes[0];
  ASSERT_EQ(sp.boundary.size(), 4u);
  for (const auto& p : sp.boundary) {
    EXPECT_NEAR(std::abs(p.x), 500.0, 1e-9);
    EXPECT_NEAR(std::abs(p.y), 400.0, 1e-9);
    EXPECT_NEAR(p.z, 2.0 * kD0, 1e-9);
  }
  for (const auto& t : sp.provenance) EXPECT_EQ(t, (EdgeTag{Trim::box, -1}));
}

TEST(Assemble, DefaultBoxHoldsEveryPatch) {
  const auto cell = ConvexPolygon2::rectangle({206, 206}, {306, 306});
  const auto scene = assemble({{flat_estimate(0, kView.picture_center, kD0, 0.5 * kView.reference_length), cell}}, kView);
  EXPECT_NEAR(scene.box.lo.z, kD0, 1e-5 * kD0);
  EXPECT_GE(scene.box.hi.z, 2.0 * kD0);
  for (const auto& p : scene.planes.at(0).base_patch) EXPECT_TRUE(scene.box.contains(p));
}

TEST(Assemble, DihedralPairSharesItsIntersectionLine) {
  // A: z = 2 D0 over the left cell; B: z = 2 D0 + x / 2 over the right one
  const auto left = ConvexPolygon2::rectangle({156, 206}, {256, 306});
  const auto right = ConvexPolygon2::rectangle({256, 206}, {356, 306});
  PlaneEstimate a = flat_estimate(0, {206, 256}, 0.0, 200.0);
  a.d1 = std::hypot(-50.0, kD0);
  PlaneEstimate b = flat_estimate(1, {306, 256}, 0.0, 200.0);
  b.p = 0.5;
  const double to_picture = std::hypot(50.0, kD0);
  b.d1 = (2.0 * kD0 / (kD0 - 25.0) - 1.0) * to_picture;
  const Box3 box{{-800, -800, 300}, {800, 800, 3000}};
  const auto scene = assemble({{b, right}, {a, left}}, kView, box);
  ASSERT_EQ(scene.planes.size(), 2u);
  EXPECT_EQ(scene.planes[0].segment_id, 0);
  EXPECT_NEAR(scene.planes[1].plane.eval({0, 0, 2.0 * kD0}), 0.0, 1e-9);

  std::vector<std::pair<Vec3, Vec3>> cuts;
  for (const auto& sp : scene.planes) {
    int count = 0;
    for (std::size_t k = 0; k < sp.boundary.size(); ++k)
      if (sp.provenance[k].kind == Trim::plane_intersection) {
        ++count;
        EXPECT_EQ(sp.provenance[k].partner, 1 - sp.segment_id);
        cuts.push_back({sp.boundary[k], sp.boundary[(k + 1) % sp.boundary.size()]});
      } else {
        EXPECT_EQ(sp.provenance[k].kind, Trim::box);
      }
    EXPECT_EQ(count, 1);
  }
  ASSERT_EQ(cuts.size(), 2u);
  const double scale = scene.box.diagonal();
  // the common line is x = 0, z = 2 D0
  for (const auto& [p, q] : cuts)
    for (const Vec3 v : {p, q}) {
      EXPECT_NEAR(v.x, 0.0, 1e-9 * scale);
      EXPECT_NEAR(v.z, 2.0 * kD0, 1e-9 * scale);
    }
  EXPECT_LT(line_residual(cuts[0].first, cuts[0].second, cuts[1].first), 1e-9 * scale);
  EXPECT_LT(line_residual(cuts[0].first, cuts[0].second, cuts[1].second), 1e-9 * scale);
}

TEST(Assemble, ParallelNeighboursAreNotCut) {
  const auto left = ConvexPolygon2::rectangle({156, 206}, {256, 306});
  const auto right = ConvexPolygon2::rectangle({256, 206}, {356, 306});
  const Box3 box{{-800, -800, 300}, {800, 800, 4000}};
  const auto scene = assemble({{flat_estimate(0, {206, 256}, 300.0, 200.0), left},
                               {flat_estimate(1, {306, 256}, 900.0, 200.0), right}},
                              kView, box);
  ASSERT_EQ(scene.planes.size(), 2u);
  for (const auto& sp : scene.planes)
    for (const auto& t : sp.provenance) EXPECT_NE(t.kind, Trim::plane_intersection);
}

TEST(Assemble, PropertyPlanarityAndContainment) {
  for (std::uint64_t seed : {1ull, 7ull, 99ull, 2024ull, 31337ull}) {
    const auto scene = seeded_scene(seed, 9);
    const double diag = scene.box.diagonal();
    ASSERT_FALSE(scene.planes.empty());
    for (const auto& sp : scene.planes) {
      EXPECT_NEAR(norm(sp.plane.normal), 1.0, 1e-15);
      EXPECT_GT(sp.plane.normal.z, 0.0);
      ASSERT_GE(sp.boundary.size(), 3u);
      ASSERT_EQ(sp.provenance.size(), sp.boundary.size());
      for (const auto& v : sp.boundary) {
        EXPECT_LT(std::abs(sp.plane.eval(v)), 1e-9 * diag);
        EXPECT_TRUE(scene.box.contains(v, 1e-9 * diag));
      }
      for (const auto& v : sp.base_patch) {
        EXPECT_LT(std::abs(sp.plane.eval(v)), 1e-9 * diag);
        EXPECT_TRUE(inside_planar(sp.boundary, sp.plane.normal, v, 1e-9 * diag)) << seed << " " << sp.segment_id;
      }
    }
  }
}

TEST(Assemble, PropertyIntersectionEdgesAreShared) {
  for (std::uint64_t seed : {3ull, 12ull, 400ull, 8128ull}) {
    const auto scene = seeded_scene(seed, 12);
    const double diag = scene.box.diagonal();
    std::map<std::pair<int, int>, std::pair<Vec3, Vec3>> edges;
    for (const auto& sp : scene.planes)
      for (std::size_t k = 0; k < sp.boundary.size(); ++k)
        if (sp.provenance[k].kind == Trim::plane_intersection)
          edges[{sp.segment_id, sp.provenance[k].partner}] = {sp.boundary[k], sp.boundary[(k + 1) % sp.boundary.size()]};
    for (const auto& [key, e] : edges) {
      auto it = edges.find({key.second, key.first});
      if (it == edges.end()) continue;
      EXPECT_LT(line_residual(e.first, e.second, it->second.first), 1e-9 * diag);
      EXPECT_LT(line_residual(e.first, e.second, it->second.second), 1e-9 * diag);
    }
  }
}

TEST(Assemble, PropertyCrossIterationPlanesAreIdentical) {
  for (std::uint64_t seed : {5ull, 77ull, 1234ull}) {
    const auto early = estimate_state(generate(kConfig, seed, 6), kView);
    const auto late = estimate_state(generate(kConfig, seed, 12), kView);
    std::map<int, Plane3> by_id;
    for (const auto& in : early.inputs) by_id[in.estimate.segment_id] = place_plane(in.estimate, kView);
    int common = 0;
    for (const auto& in : late.inputs) {
      auto it = by_id.find(in.estimate.segment_id);
      if (it == by_id.end()) continue;
      EXPECT_EQ(place_plane(in.estimate, kView), it->second);
      ++common;
    }
    EXPECT_GT(common, 0);
  }
}

TEST(ExportObj, EmptySceneIsHeaderOnly) {
  SceneModel scene;
  scene.seed = 42;
  scene.iteration = 7;
  EXPECT_EQ(export_obj(scene), "# texinv scene\n# seed 42 iteration 7\n");
}

TEST(ExportObj, SingleSquare) {
  SceneModel scene;
  ScenePlane sp;
  sp.boundary = {{0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1.5}};
  scene.planes.push_back(sp);
  EXPECT_EQ(export_obj(scene),
            "# texinv scene\n# seed 0 iteration 0\n"
            "v 0.000000 0.000000 1.000000\nv 1.000000 0.000000 1.000000\n"
            "v 1.000000 1.000000 1.000000\nv 0.000000 1.000000 1.500000\nf 1 2 3 4\n");
}

TEST(ExportObj, FaceIndicesContinueAcrossPlanes) {
  const auto scene = seeded_scene(17, 8);
  const std::string obj = export_obj(scene);
  std::size_t vertices = 0;
  for (const auto& sp : scene.planes) vertices += sp.boundary.size();
  std::size_t v_lines = 0, f_lines = 0, pos = 0;
  while ((pos = obj.find('\n', pos)) != std::string::npos) {
    ++pos;
    if (obj.compare(pos, 2, "v ") == 0) ++v_lines;
    if (obj.compare(pos, 2, "f ") == 0) ++f_lines;
  }
  EXPECT_EQ(v_lines, vertices);
  EXPECT_EQ(f_lines, scene.planes.size());
  EXPECT_NE(obj.find(" " + std::to_string(vertices) + "\n"), std::string::npos);
}

TEST(ExportObj, SameSeedIsByteIdentical) {
  EXPECT_EQ(export_obj(seeded_scene(2718, 10)), export_obj(seeded_scene(2718, 10)));
  EXPECT_EQ(dump_record(to_json(seeded_scene(2718, 10))), dump_record(to_json(seeded_scene(2718, 10))));
}

TEST(SceneJson, RecordsProvenanceTags) {
  const Json j = to_json(seeded_scene(61, 10));
  ASSERT_TRUE(j.contains("planes"));
  bool saw_box = false;
  for (const auto& p : j["planes"])
    for (const auto& t : p["trim_provenance"]) {
      const std::string k = t["kind"];
      EXPECT_TRUE(k == "box" || k == "plane-intersection" || k == "sight-boundary");
      saw_box = saw_box || k == "box";
    }
  EXPECT_TRUE(saw_box);
}
