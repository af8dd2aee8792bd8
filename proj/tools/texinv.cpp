// texinv command-line driver.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "texinv/http_server.hpp"
#include "texinv/oracle.hpp"
#include "texinv/records.hpp"

namespace fs = std::filesystem;
using namespace texinv;

namespace {

constexpr int kOk = 0;
constexpr int kBreach = 1;  // tolerance breach or failed verification
constexpr int kUsage = 2;
constexpr int kFailure = 3;

struct ConfigFlags {
  std::string config_path;
  std::optional<int> width, height;
  std::optional<double> d0;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "GenConfig JSON file (flags override it)");
    app->add_option("--width", width, "picture width");
    app->add_option("--height", height, "picture height");
  }

  // Size-derived defaults apply unless the file sets them explicitly.
  GenConfig resolve() const {
    Json file = Json::object();
    if (!config_path.empty()) file = parse_record(read_text_file(config_path));
    if (!file.is_object()) throw Error(ErrorCode::InvalidConfig, "config file must hold an object");
    const int w = width.value_or(file.contains("width") ? detail::integer(file["width"]) : 512);
    const int h = height.value_or(file.contains("height") ? detail::integer(file["height"]) : 512);
    if (w <= 0 || h <= 0) throw Error(ErrorCode::InvalidConfig, "picture size must be positive");
    GenConfig c = config_from_json(file, GenConfig::for_size(w, h));
    c.width = w;
    c.height = h;
    if (d0) c.eye_distance = *d0;
    c.validate();
    return c;
  }
};

void write_raster(const fs::path& dir, int iteration, const RasterImage& img, const std::string& format) {
  char name[32];
  if (format == "png" || format == "both") {
    std::snprintf(name, sizeof name, "iter_%03d.png", iteration);
    write_text_file((dir / name).string(), encode_png(img));
  }
  if (format == "pgm" || format == "both") {
    std::snprintf(name, sizeof name, "iter_%03d.pgm", iteration);
    write_text_file((dir / name).string(), encode_pgm(img));
  }
}

int run_gen(std::uint64_t seed, int iterations, const GenConfig& config, const std::string& out,
            const std::string& format) {
  if (iterations < 0) throw Error(ErrorCode::InvalidArgument, "--iterations must be non-negative");
  const auto states = generate_lineage(config, seed, iterations);
  fs::create_directories(out);
  write_text_file((fs::path(out) / "dataset.jsonl").string(), dataset_text(states));
  for (const auto& s : states)
    if (s.token.iteration > 0) write_raster(out, s.token.iteration, rasterize(s), format);
  std::cout << "wrote " << states.size() << " records, " << states.back().segments.size() << " segments\n";
  return kOk;
}

int run_invert(const std::string& dataset, std::optional<double> d0, std::optional<int> iteration,
               const std::string& out) {
  const auto states = read_dataset_file(dataset);
  if (states.empty()) throw Error(ErrorCode::CorruptRecord, "dataset holds no records");
  const SequenceState* pick = &states.back();
  if (iteration) {
    pick = nullptr;
    for (const auto& s : states)
      if (s.token.iteration == *iteration) pick = &s;
    if (!pick) throw Error(ErrorCode::InvalidArgument, "no record at iteration " + std::to_string(*iteration));
  }
  const double eye = d0.value_or(pick->config.eye_distance);
  const auto viewing = ViewingGeometry::for_picture(pick->config.width, pick->config.height, eye);
  const EstimateSet set = estimate_state(*pick, viewing);
  write_text_file(out, save_estimates(set) + "\n");
  std::cout << "estimated " << set.inputs.size() << " planes";
  if (!set.failures.empty()) std::cout << ", " << set.failures.size() << " rejected";
  std::cout << "\n";
  return kOk;
}

int run_assemble(const std::string& estimates, const std::string& out, const std::string& json_out) {
  const SceneModel scene = assemble_estimates(load_estimates(read_text_file(estimates)));
  write_text_file(out, export_obj(scene));
  if (!json_out.empty()) write_text_file(json_out, dump_record(to_json(scene)) + "\n");
  std::cout << "scene: " << scene.planes.size() << " planes";
  for (const auto& i : scene.issues) std::cout << "; segment " << i.segment_id << " " << to_string(i.code);
  std::cout << "\n";
  return kOk;
}

int run_oracle_check(int trials, std::uint64_t seed, double tol, const GenConfig& config) {
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "--trials must be positive");
  const RoundTripErrors e = oracle_sweep(trials, seed, config);
  const double diag = std::hypot(config.width, config.height);
  std::printf("trials %d\nmax slant error %.3e rad\nmax tilt error %.3e rad\nmax center error %.3e diag\n"
              "max distance error %.3e rel\n",
              e.trials, e.slant, e.tilt, e.center / diag, e.distance);
  const bool ok = e.slant < tol && e.tilt < tol && e.center < tol * diag && e.distance < tol;
  std::cout << (ok ? "within tolerance\n" : "TOLERANCE BREACH\n");
  return ok ? kOk : kBreach;
}

int run_replay(const std::string& dataset, const std::string& session_log, bool verify) {
  if (!session_log.empty()) {
    const Json log = parse_record(read_text_file(session_log));
    const ReplayResult r = replay_session(log);
    std::cout << "selected " << r.selected.size() << ", continued " << r.new_tokens.size() << "\n";
    if (!verify) return kOk;
    const bool ok = verify_session_log(log);
    std::cout << (ok ? "session log verified\n" : "session log MISMATCH\n");
    return ok ? kOk : kBreach;
  }
  std::ifstream in(dataset, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open dataset " + dataset);
  std::string line;
  int records = 0, mismatches = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const SequenceState stored = load_record(line);
    ++records;
    if (!verify) continue;
    const std::string again = save_record(generate(stored.config, stored.token.seed, stored.token.iteration));
    if (again != line) {
      ++mismatches;
      std::cout << "record at iteration " << stored.token.iteration << " differs\n";
    }
  }
  std::cout << records << " records";
  if (verify) std::cout << ", " << mismatches << " mismatches";
  std::cout << "\n";
  return mismatches == 0 ? kOk : kBreach;
}

int run_serve(const std::string& host, int port, double soa_ms, const std::string& dataset,
              const std::string& log_dir, const std::string& static_dir, const ConfigFlags& flags) {
  GenConfig config = flags.resolve();
  if (!dataset.empty()) {
    const auto states = read_dataset_file(dataset);
    if (!states.empty()) config = states.front().config;
  }
  if (!(soa_ms >= kMinSoaMs && soa_ms <= kMaxSoaMs))
    throw Error(ErrorCode::InvalidArgument, "--soa-ms must lie in [100, 1000]");
  SessionStore store(config, soa_ms, log_dir);
  httplib::Server server;
  install_routes(server, store, static_dir);
  std::cout << "listening on " << host << ":" << port << std::endl;
  if (!server.listen(host, port)) throw Error(ErrorCode::InvalidArgument, "cannot bind port");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"texinv: stimulus generation, plane inversion and scene assembly"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  int iterations = 0;
  std::string out, format = "png";
  ConfigFlags gen_cfg;
  auto* gen = app.add_subcommand("gen", "generate a seeded sequence");
  gen->add_option("--seed", seed)->required();
  gen->add_option("--iterations", iterations)->required();
  gen->add_option("--out", out, "output directory")->required();
  gen->add_option("--format", format)->check(CLI::IsMember({"png", "pgm", "both"}));
  gen_cfg.attach(gen);

  std::string dataset;
  std::optional<double> d0;
  std::optional<int> iteration;
  auto* invert = app.add_subcommand("invert", "estimate one plane per segment");
  invert->add_option("--dataset", dataset)->required();
  invert->add_option("--d0", d0, "eye distance (default: the dataset's)");
  invert->add_option("--iteration", iteration, "record to invert (default: last)");
  invert->add_option("--out", out)->required();

  std::string estimates, json_out;
  auto* assemble_cmd = app.add_subcommand("assemble", "build and export the bounded scene");
  assemble_cmd->add_option("--estimates", estimates)->required();
  assemble_cmd->add_option("--out", out, "OBJ output")->required();
  assemble_cmd->add_option("--json", json_out, "scene record output");

  int trials = 1000;
  double tol = 1e-6;
  ConfigFlags oracle_cfg;
  auto* oracle = app.add_subcommand("oracle-check", "forward/inverse round-trip sweep");
  oracle->add_option("--trials", trials);
  oracle->add_option("--seed", seed);
  oracle->add_option("--tol", tol);
  oracle_cfg.attach(oracle);

  int port = 8080;
  double soa_ms = kDefaultSoaMs;
  std::string host = "127.0.0.1", log_dir, static_dir;
  ConfigFlags serve_cfg;
  auto* serve = app.add_subcommand("serve", "run the session server");
  serve->add_option("--port", port);
  serve->add_option("--host", host);
  serve->add_option("--soa-ms", soa_ms);
  serve->add_option("--dataset", dataset, "dataset whose config new sessions default to");
  serve->add_option("--log-dir", log_dir);
  serve->add_option("--static", static_dir, "viewer assets mounted at /");
  serve_cfg.attach(serve);

  bool verify = false;
  std::string session_log;
  auto* replay = app.add_subcommand("replay", "re-derive records from their seeds");
  auto* replay_dataset = replay->add_option("--dataset", dataset);
  auto* replay_log = replay->add_option("--session-log", session_log);
  replay_dataset->excludes(replay_log);
  replay->add_flag("--verify", verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*gen) return run_gen(seed, iterations, gen_cfg.resolve(), out, format);
    if (*invert) return run_invert(dataset, d0, iteration, out);
    if (*assemble_cmd) return run_assemble(estimates, out, json_out);
    if (*oracle) return run_oracle_check(trials, seed, tol, oracle_cfg.resolve());
    if (*serve) return run_serve(host, port, soa_ms, dataset, log_dir, static_dir, serve_cfg);
    if (*replay) {
      if (dataset.empty() && session_log.empty()) {
        std::cerr << "replay needs --dataset or --session-log\n";
        return kUsage;
      }
      return run_replay(dataset, session_log, verify);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    const bool usage = e.code() == ErrorCode::InvalidArgument || e.code() == ErrorCode::InvalidConfig;
    return usage ? kUsage : kFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
