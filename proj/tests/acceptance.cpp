// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Usage: acceptance <path-to-texinv-cli>

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>

#include "support.hpp"
#include "texinv/oracle.hpp"
#include "texinv/records.hpp"

namespace fs = std::filesystem;
using namespace texinv;

namespace {

// pinned tolerances
constexpr double kDeterminismSeconds = 10.0;
constexpr double kOracleSeconds = 30.0;
constexpr double kAngleTol = 1e-6;          // rad
constexpr double kCenterTol = 1e-6;         // x picture diagonal
constexpr double kDistanceTol = 1e-6;       // relative
constexpr double kPlanarityTol = 1e-9;      // x box diagonal
constexpr double kCollinearTol = 1e-9;      // x box diagonal
constexpr double kReciprocityTol = 1e-12;   // relative to D0

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int run(const std::string& cmd) {
  const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool same_creation(const TextureSegment& a, const TextureSegment& b) {
  return a.id == b.id && a.created_at == b.created_at && a.creation_polygon == b.creation_polygon &&
         a.roles == b.roles && a.f == b.f && a.order == b.order && a.band_lines == b.band_lines;
}

void determinism(const std::string& cli, const fs::path& work) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t seed = 20240917;
  const fs::path a = work / "det_a", b = work / "det_b";
  const std::string gen = cli + " gen --seed " + std::to_string(seed) + " --iterations 12 --format both --out ";
  bool ok = run(gen + a.string()) == 0 && run(gen + b.string()) == 0;
  int files = 0, differing = 0;
  if (ok) {
    for (const auto& entry : fs::directory_iterator(a)) {
      ++files;
      const fs::path other = b / entry.path().filename();
      if (!fs::exists(other) || read_text_file(entry.path().string()) != read_text_file(other.string())) ++differing;
    }
  }
  const int replay = run(cli + " replay --dataset " + (a / "dataset.jsonl").string() + " --verify");
  const double secs = seconds_since(t0);
  ok = ok && files == 25 && differing == 0 && replay == 0 && secs < kDeterminismSeconds;
  report(ok, "determinism-replay",
         fmt("%d files, %d differing, replay exit %d, %.2f s (limit %.0f s)", files, differing, replay, secs,
             kDeterminismSeconds));
}

void persistence_structure() {
  const GenConfig config;
  int seeds = 0, bad_counts = 0, bad_fields = 0, clips_changed = 0;
  for (std::uint64_t seed = 100; seed < 120; ++seed, ++seeds) {
    std::vector<SequenceState> lineage = generate_lineage(config, seed, 12);
    if (lineage[4].segments.size() != 4 || lineage[9].segments.size() != 9) ++bad_counts;
    for (std::size_t it = 1; it < lineage.size(); ++it) {
      if (lineage[it].segments.size() != it) ++bad_counts;
      for (std::size_t j = 0; j < lineage[it - 1].segments.size(); ++j) {
        if (!same_creation(lineage[it].segments[j], lineage[it - 1].segments[j])) ++bad_fields;
        if (lineage[it].segments[j].clip_polygon != lineage[it - 1].segments[j].clip_polygon) ++clips_changed;
      }
    }
  }
  report(bad_counts == 0 && bad_fields == 0 && clips_changed > 0, "segment-persistence",
         fmt("%d seeds, %d count errors, %d creation-field changes, %d clip updates", seeds, bad_counts, bad_fields,
             clips_changed));
}

void reproducibility() {
  const GenConfig config;
  const ViewingGeometry view = ViewingGeometry::for_config(config);
  const Tolerances tol = config.tolerances();
  int compared = 0, est_diff = 0, plane_diff = 0, failure_mismatch = 0;
  for (std::uint64_t seed = 500; seed < 520; ++seed) {
    const SequenceState early = generate(config, seed, 6);
    const SequenceState late = generate(config, seed, 12);
    for (const auto& seg : early.segments) {
      const TextureSegment& later = late.segments.at(static_cast<std::size_t>(seg.id));
      std::optional<PlaneEstimate> a, b;
      std::optional<ErrorCode> ea, eb;
      try {
        a = estimate_plane(seg, view, tol);
      } catch (const Error& e) {
        ea = e.code();
      }
      try {
        b = estimate_plane(later, view, tol);
      } catch (const Error& e) {
        eb = e.code();
      }
      ++compared;
      if (ea != eb) ++failure_mismatch;
      if (!a || !b) continue;
      if (!(*a == *b)) ++est_diff;
      if (!(place_plane(*a, view) == place_plane(*b, view))) ++plane_diff;
    }
  }
  report(est_diff == 0 && plane_diff == 0 && failure_mismatch == 0 && compared > 0, "cross-step-reproducibility",
         fmt("20 sequences, %d common segments, %d estimate / %d plane / %d outcome differences", compared, est_diff,
             plane_diff, failure_mismatch));
}

void oracle_round_trip() {
  const GenConfig config;
  const auto t0 = std::chrono::steady_clock::now();
  const RoundTripErrors e = oracle_sweep(1000, 1, config);
  const double secs = seconds_since(t0);
  const double diag = std::hypot(config.width, config.height);
  const bool ok = e.trials == 1000 && e.slant < kAngleTol && e.tilt < kAngleTol && e.center < kCenterTol * diag &&
                  e.distance < kDistanceTol && secs < kOracleSeconds;
  report(ok, "oracle-round-trip",
         fmt("%d trials, slant %.2e rad, tilt %.2e rad, V1 %.2e diag, D1 %.2e rel, %.2f s", e.trials, e.slant, e.tilt,
             e.center / diag, e.distance, secs));
}

void voronoi_oracle() {
  const GenConfig config;
  const double eps = config.tolerances().dist;
  int diagrams = 0, mismatches = 0, ties = 0;
  std::size_t max_sites = 0;
  for (int i = 0; i < 50; ++i, ++diagrams) {
    const SequenceState s = generate(config, 9000 + static_cast<std::uint64_t>(i), 1 + i % 12);
    const VoronoiDiagram& d = s.diagram;
    max_sites = std::max(max_sites, d.interior_count);
    for (int gy = 0; gy < 100; ++gy)
      for (int gx = 0; gx < 100; ++gx) {
        const Point2 p{(gx + 0.5) * config.width / 100.0, (gy + 0.5) * config.height / 100.0};
        const auto n = oracle::nearest_site(d.sites, p);
        if (n.second - n.best <= eps) {
          ++ties;
          continue;
        }
        if (n.index < d.interior_count) {
          if (!oracle::inside_ccw(d.cells[n.index].vertices(), p, eps)) ++mismatches;
        } else {
          for (const auto& c : d.cells)
            if (oracle::inside_ccw(c.vertices(), p, -eps)) ++mismatches;
        }
      }
  }
  report(mismatches == 0 && max_sites <= 12, "voronoi-oracle",
         fmt("%d diagrams (up to %zu sites), 100x100 grid, %d mismatches, %d ties skipped", diagrams, max_sites,
             mismatches, ties));
}

void scene_validity(const std::string& cli, const fs::path& work) {
  const GenConfig config;
  const ViewingGeometry view = ViewingGeometry::for_config(config);
  double worst_planar = 0.0, worst_collinear = 0.0;
  int scenes = 0, shared = 0, obj_diff = 0;
  for (std::uint64_t seed = 700; seed < 720; ++seed, ++scenes) {
    const EstimateSet set = estimate_state(generate(config, seed, 12), view);
    const SceneModel scene = assemble_estimates(set);
    const double diag = scene.box.diagonal();
    std::map<std::pair<int, int>, std::pair<Vec3, Vec3>> edges;
    for (const auto& sp : scene.planes)
      for (std::size_t k = 0; k < sp.boundary.size(); ++k) {
        worst_planar = std::max(worst_planar, std::abs(sp.plane.eval(sp.boundary[k])) / diag);
        if (sp.provenance[k].kind == Trim::plane_intersection)
          edges[{sp.segment_id, sp.provenance[k].partner}] = {sp.boundary[k], sp.boundary[(k + 1) % sp.boundary.size()]};
      }
    for (const auto& [key, e] : edges) {
      if (key.first > key.second) continue;
      auto it = edges.find({key.second, key.first});
      if (it == edges.end()) continue;
      ++shared;
      const Vec3 dir = e.second - e.first;
      for (const Vec3 p : {it->second.first, it->second.second})
        worst_collinear = std::max(worst_collinear, norm(cross(dir, p - e.first)) / norm(dir) / diag);
    }
    if (export_obj(scene) != export_obj(assemble_estimates(estimate_state(generate(config, seed, 12), view))))
      ++obj_diff;
  }
  // the same through the command line
  const fs::path d = work / "scene";
  const std::string ds = (d / "dataset.jsonl").string(), est = (d / "est.json").string();
  bool cli_ok = run(cli + " gen --seed 700 --iterations 12 --out " + d.string()) == 0 &&
                run(cli + " invert --dataset " + ds + " --out " + est) == 0 &&
                run(cli + " assemble --estimates " + est + " --out " + (d / "a.obj").string()) == 0 &&
                run(cli + " assemble --estimates " + est + " --out " + (d / "b.obj").string()) == 0;
  cli_ok = cli_ok && read_text_file((d / "a.obj").string()) == read_text_file((d / "b.obj").string());
  const bool ok = worst_planar < kPlanarityTol && worst_collinear < kCollinearTol && obj_diff == 0 && cli_ok;
  report(ok, "scene-validity",
         fmt("%d scenes, planarity %.2e diag, %d shared edges collinear to %.2e diag, %d OBJ differences, cli %s",
             scenes, worst_planar, shared, worst_collinear, obj_diff, cli_ok ? "identical" : "FAILED"));
}

void reciprocity() {
  const ViewingGeometry view = ViewingGeometry::for_config(GenConfig{});
  const double lr = view.reference_length, d0 = view.eye_distance;
  const double at_lr = distance_from_reciprocity(lr, view);
  const double at_half = distance_from_reciprocity(lr / 2.0, view);
  bool monotone = true;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 100; ++k) {
    const double d = distance_from_reciprocity(lr * k / 100.0, view);
    monotone = monotone && d < prev;
    prev = d;
  }
  const bool ok = std::abs(at_lr) <= kReciprocityTol * d0 && std::abs(at_half - d0) <= kReciprocityTol * d0 && monotone;
  report(ok, "reciprocity", fmt("D1(Lr) = %.3g, D1(Lr/2) = %.6f (D0 = %.1f), 100-point sweep %s", at_lr, at_half, d0,
                                monotone ? "strictly decreasing" : "NOT decreasing"));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <texinv-cli>\n");
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path work = fs::temp_directory_path() / ("texinv_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(work);
  fs::create_directories(work);

  determinism(cli, work);
  persistence_structure();
  reproducibility();
  oracle_round_trip();
  voronoi_oracle();
  scene_validity(cli, work);
  reciprocity();

  fs::remove_all(work);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
