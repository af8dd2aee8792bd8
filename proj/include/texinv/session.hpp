#pragma once

#include <zlib.h>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "texinv/dataset.hpp"
#include "texinv/raster.hpp"

namespace texinv {

inline constexpr double kMinSoaMs = 100.0;
inline constexpr double kMaxSoaMs = 1000.0;
inline constexpr double kDefaultSoaMs = 250.0;
inline constexpr double kDefaultWindowMs = 600.0;

enum class Phase { presenting, reviewing, iterated };

inline const char* to_string(Phase p) {
  switch (p) {
    case Phase::presenting: return "presenting";
    case Phase::reviewing: return "reviewing";
    case Phase::iterated: return "iterated";
  }
  return "?";
}

struct SessionParams {
  GenConfig config;
  std::uint64_t seed = 0;
  int n_pictures = 20;
  double soa_ms = kDefaultSoaMs;
  int iterations = 4;          // generative steps of each first-round picture
  double window_ms = 0.0;      // 0 picks min(600, 3 * soa)

  double effective_window() const { return window_ms > 0.0 ? window_ms : std::min(kDefaultWindowMs, 3.0 * soa_ms); }

  void validate() const {
    config.validate();
    if (n_pictures < 1 || n_pictures > 1000) throw Error(ErrorCode::InvalidArgument, "n_pictures must be 1..1000");
    if (!(soa_ms >= kMinSoaMs && soa_ms <= kMaxSoaMs))
      throw Error(ErrorCode::InvalidArgument, "soa_ms must lie in [100, 1000]");
    if (iterations < 0 || iterations > 64) throw Error(ErrorCode::InvalidArgument, "iterations must be 0..64");
    const double w = effective_window();
    if (!(w > 0.0 && w <= 3.0 * soa_ms)) throw Error(ErrorCode::InvalidArgument, "window_ms must lie in (0, 3 * soa_ms]");
  }
};

struct PlanEntry {
  int index = 0;
  std::string picture_id;
  double onset_ms = 0.0;
  SeedToken token;

  friend bool operator==(const PlanEntry&, const PlanEntry&) = default;
};

struct Response {
  int onset_index = 0;
  double t_response_ms = 0.0;
  std::string key;
  std::optional<double> measured_onset_ms;  // viewer clock, stored for skew only

  friend bool operator==(const Response&, const Response&) = default;
};

struct Session {
  std::string id;
  std::string parent;  // empty for a first-round session
  SessionParams params;
  std::vector<PlanEntry> plan;
  std::vector<Response> responses;
  std::vector<int> attributed;          // per response: plan index or -1
  std::vector<int> selected;            // ascending plan indices
  std::optional<std::vector<int>> override_selection;
  Phase phase = Phase::presenting;
  std::vector<SeedToken> new_tokens;
  std::string child;
};

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string picture_id(const SeedToken& t) { return hex64(t.seed) + "-" + std::to_string(t.iteration); }

/// Seed of the k-th first-round picture.
inline std::uint64_t picture_seed(std::uint64_t seed, int k) {
  return mix64(seed ^ mix64(static_cast<std::uint64_t>(k) + kGolden));
}

inline std::vector<PlanEntry> plan_for_tokens(const std::vector<SeedToken>& tokens, double soa_ms) {
  std::vector<PlanEntry> plan;
  for (std::size_t k = 0; k < tokens.size(); ++k)
    plan.push_back({static_cast<int>(k), picture_id(tokens[k]), static_cast<double>(k) * soa_ms, tokens[k]});
  return plan;
}

inline std::vector<SeedToken> first_round_tokens(const SessionParams& p) {
  std::vector<SeedToken> tokens;
  for (int k = 0; k < p.n_pictures; ++k) tokens.push_back({picture_seed(p.seed, k), p.iterations});
  return tokens;
}

inline bool is_selection_key(const std::string& key) { return key == " " || key == "space" || key == "Space"; }

/// Plan index a response is attributed to, or -1. The picture named by the
/// viewer wins when the response falls in its window; otherwise the latest
/// onset whose window holds the response.
inline int attribute_response(const std::vector<PlanEntry>& plan, const Response& r, double window_ms) {
  if (!is_selection_key(r.key)) return -1;
  auto in_window = [&](const PlanEntry& e) {
    const double dt = r.t_response_ms - e.onset_ms;
    return dt >= 0.0 && dt <= window_ms;
  };
  if (r.onset_index >= 0 && static_cast<std::size_t>(r.onset_index) < plan.size() && in_window(plan[r.onset_index]))
    return r.onset_index;
  for (std::size_t k = plan.size(); k-- > 0;)
    if (plan[k].onset_ms <= r.t_response_ms && in_window(plan[k])) return static_cast<int>(k);
  return -1;
}

struct Attribution {
  std::vector<int> per_response;
  std::vector<int> selected;
};

inline Attribution attribute(const std::vector<PlanEntry>& plan, const std::vector<Response>& responses,
                             double window_ms) {
  Attribution a;
  std::set<int> chosen;
  for (const auto& r : responses) {
    const int k = attribute_response(plan, r, window_ms);
    a.per_response.push_back(k);
    if (k >= 0) chosen.insert(k);
  }
  a.selected.assign(chosen.begin(), chosen.end());
  return a;
}

inline std::string make_session_id(const SessionParams& p, std::uint64_t counter, const std::string& parent) {
  std::uint64_t h = mix64(p.seed ^ kGolden);
  h = mix64(h ^ static_cast<std::uint64_t>(p.n_pictures));
  h = mix64(h ^ static_cast<std::uint64_t>(p.soa_ms * 1000.0));
  h = mix64(h ^ static_cast<std::uint64_t>(p.iterations));
  h = mix64(h ^ counter);
  for (unsigned char c : parent) h = mix64(h ^ c);
  return "s" + hex64(h);
}

inline Session create_session(const SessionParams& params, std::uint64_t counter = 0) {
  params.validate();
  Session s;
  s.params = params;
  s.id = make_session_id(params, counter, "");
  s.plan = plan_for_tokens(first_round_tokens(params), params.soa_ms);
  return s;
}

inline void require_phase(const Session& s, Phase p) {
  if (s.phase != p)
    throw Error(ErrorCode::PhaseViolation,
                std::string("session is ") + to_string(s.phase) + ", expected " + to_string(p));
}

/// Appends a response; an exact repeat of a logged response is ignored.
inline void record_response(Session& s, const Response& r) {
  require_phase(s, Phase::presenting);
  if (!std::isfinite(r.t_response_ms)) throw Error(ErrorCode::InvalidArgument, "t_response_ms must be finite");
  if (std::find(s.responses.begin(), s.responses.end(), r) != s.responses.end()) return;
  s.responses.push_back(r);
}

inline const std::vector<int>& finish(Session& s) {
  require_phase(s, Phase::presenting);
  const Attribution a = attribute(s.plan, s.responses, s.params.effective_window());
  s.attributed = a.per_response;
  s.selected = a.selected;
  s.phase = Phase::reviewing;
  return s.selected;
}

/// Operator correction during review; must name presented pictures.
inline void override_selection(Session& s, std::vector<int> selected) {
  require_phase(s, Phase::reviewing);
  std::sort(selected.begin(), selected.end());
  selected.erase(std::unique(selected.begin(), selected.end()), selected.end());
  for (int k : selected)
    if (k < 0 || static_cast<std::size_t>(k) >= s.plan.size())
      throw Error(ErrorCode::InvalidArgument, "selection names a picture outside the plan");
  s.override_selection = selected;
  s.selected = std::move(selected);
}

/// Continues every selected token by one generative step and opens the
/// follow-up session presenting the successors.
inline Session iterate_from_selection(Session& s, std::uint64_t counter = 0) {
  require_phase(s, Phase::reviewing);
  if (s.selected.empty()) throw Error(ErrorCode::EmptySelection, "no picture selected");
  std::vector<SeedToken> next;
  for (int k : s.selected) {
    SeedToken t = s.plan[k].token;
    t.iteration += 1;
    next.push_back(t);
  }
  Session child;
  child.params = s.params;
  child.parent = s.id;
  child.id = make_session_id(s.params, counter, s.id);
  child.plan = plan_for_tokens(next, s.params.soa_ms);
  s.new_tokens = std::move(next);
  s.child = child.id;
  s.phase = Phase::iterated;
  return child;
}

inline SequenceState picture_state(const SessionParams& p, const SeedToken& t) {
  return generate(p.config, t.seed, t.iteration);
}

inline std::string picture_png(const SessionParams& p, const SeedToken& t) {
  return encode_png(rasterize(picture_state(p, t)));
}

/// Dataset of a continued token: records for iterations 0..t.iteration.
inline std::string token_dataset(const SessionParams& p, const SeedToken& t) {
  return dataset_text(generate_lineage(p.config, t.seed, t.iteration));
}

inline std::uint32_t text_crc(const std::string& s) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(s.data()), static_cast<uInt>(s.size())));
}

// ---- log -------------------------------------------------------------------

inline Json to_json(const SeedToken& t) { return {{"seed", t.seed}, {"iteration", t.iteration}}; }

inline Json to_json(const PlanEntry& e) {
  return {{"index", e.index}, {"picture_id", e.picture_id}, {"onset_ms", e.onset_ms}, {"token", to_json(e.token)}};
}

inline Json to_json(const Response& r) {
  Json j = {{"onset_index", r.onset_index}, {"t_response_ms", r.t_response_ms}, {"key", r.key}};
  if (r.measured_onset_ms) j["measured_onset_ms"] = *r.measured_onset_ms;
  return j;
}

inline Json to_json(const SessionParams& p) {
  return {{"config", to_json(p.config)}, {"seed", p.seed},
          {"n_pictures", p.n_pictures},  {"soa_ms", p.soa_ms},
          {"iterations", p.iterations},  {"window_ms", p.effective_window()}};
}

/// Full session log. With the continued tokens it records the checksum of
/// each next-iteration dataset so a replay can be verified offline.
inline Json session_log(const Session& s) {
  Json plan = Json::array(), responses = Json::array(), tokens = Json::array();
  for (const auto& e : s.plan) plan.push_back(to_json(e));
  for (std::size_t i = 0; i < s.responses.size(); ++i) {
    Json r = to_json(s.responses[i]);
    if (i < s.attributed.size()) r["attributed_to"] = s.attributed[i];
    if (s.responses[i].measured_onset_ms && static_cast<std::size_t>(s.responses[i].onset_index) < s.plan.size())
      r["onset_skew_ms"] = *s.responses[i].measured_onset_ms - s.plan[s.responses[i].onset_index].onset_ms;
    responses.push_back(std::move(r));
  }
  for (const auto& t : s.new_tokens) {
    Json j = to_json(t);
    j["dataset_crc32"] = text_crc(token_dataset(s.params, t));
    tokens.push_back(std::move(j));
  }
  Json log = {{"schema_version", kSchemaVersion},
              {"session_id", s.id},
              {"parent", s.parent},
              {"params", to_json(s.params)},
              {"plan", plan},
              {"responses", responses},
              {"phase", to_string(s.phase)},
              {"selected", s.selected},
              {"new_tokens", tokens},
              {"child", s.child}};
  if (s.override_selection) log["override_selection"] = *s.override_selection;
  return log;
}

inline SeedToken token_from_json(const Json& j) {
  SeedToken t;
  t.seed = detail::field(j, "seed").get<std::uint64_t>();
  t.iteration = detail::integer(detail::field(j, "iteration"));
  return t;
}

inline SessionParams params_from_json(const Json& j, const GenConfig& base = {},
                                      double default_soa_ms = kDefaultSoaMs) {
  SessionParams p;
  p.config = j.contains("config") ? config_from_json(j.at("config"), base) : base;
  const auto& seed = detail::field(j, "seed");
  if (!seed.is_number_unsigned()) detail::schema_error("seed must be an unsigned integer");
  p.seed = seed.get<std::uint64_t>();
  p.n_pictures = detail::integer(detail::field(j, "n_pictures"));
  p.soa_ms = j.contains("soa_ms") ? detail::number(j.at("soa_ms")) : default_soa_ms;
  if (j.contains("iterations")) p.iterations = detail::integer(j.at("iterations"));
  if (j.contains("window_ms")) p.window_ms = detail::number(j.at("window_ms"));
  return p;
}

inline Response response_from_json(const Json& j) {
  Response r;
  r.onset_index = detail::integer(detail::field(j, "onset_index"));
  r.t_response_ms = detail::number(detail::field(j, "t_response_ms"));
  const auto& key = detail::field(j, "key");
  if (!key.is_string()) detail::schema_error("key must be a string");
  r.key = key.get<std::string>();
  if (j.contains("measured_onset_ms")) r.measured_onset_ms = detail::number(j.at("measured_onset_ms"));
  return r;
}

struct ReplayResult {
  std::vector<int> selected;
  std::vector<SeedToken> new_tokens;
  std::vector<std::string> datasets;  // one per new token
};

/// Re-derives selection and continued datasets from the log's plan, params
/// and responses alone.
inline ReplayResult replay_session(const Json& log) {
  const SessionParams params = params_from_json(detail::field(log, "params"));
  std::vector<PlanEntry> plan;
  for (const auto& e : detail::field(log, "plan")) {
    PlanEntry p;
    p.index = detail::integer(detail::field(e, "index"));
    p.picture_id = detail::field(e, "picture_id").get<std::string>();
    p.onset_ms = detail::number(detail::field(e, "onset_ms"));
    p.token = token_from_json(detail::field(e, "token"));
    plan.push_back(p);
  }
  std::vector<Response> responses;
  for (const auto& r : detail::field(log, "responses")) responses.push_back(response_from_json(r));

  ReplayResult out;
  out.selected = attribute(plan, responses, params.effective_window()).selected;
  if (log.contains("override_selection")) out.selected = log.at("override_selection").get<std::vector<int>>();
  if (detail::field(log, "phase") != "iterated") return out;
  for (int k : out.selected) {
    SeedToken t = plan.at(k).token;
    t.iteration += 1;
    out.new_tokens.push_back(t);
    out.datasets.push_back(token_dataset(params, t));
  }
  return out;
}

/// True when the log's recorded outcome matches its replay.
inline bool verify_session_log(const Json& log) {
  const ReplayResult r = replay_session(log);
  if (log.at("selected").get<std::vector<int>>() != r.selected) return false;
  const auto& tokens = log.at("new_tokens");
  if (tokens.size() != r.new_tokens.size()) return false;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const SeedToken t = token_from_json(tokens[i]);
    if (t.seed != r.new_tokens[i].seed || t.iteration != r.new_tokens[i].iteration) return false;
    if (tokens[i].at("dataset_crc32").get<std::uint32_t>() != text_crc(r.datasets[i])) return false;
  }
  return true;
}

}  // namespace texinv
