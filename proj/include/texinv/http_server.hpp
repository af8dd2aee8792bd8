#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <regex>
#include <shared_mutex>
#include <string>

#include "httplib.h"
#include "texinv/session.hpp"

namespace texinv {

inline int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownSession: return 404;
    case ErrorCode::PhaseViolation: return 409;
    case ErrorCode::EmptySelection: return 422;
    default: return 400;
  }
}

/// Sessions keyed by id. Each entry serializes its own writers; readers
/// take the entry lock too, so they see a whole state.
class SessionStore {
 public:
  struct Entry {
    std::mutex mu;
    Session session;
    std::map<int, std::string> png_cache;
  };

  explicit SessionStore(GenConfig default_config = {}, double default_soa_ms = kDefaultSoaMs,
                        std::string log_dir = {})
      : default_config_(std::move(default_config)), default_soa_ms_(default_soa_ms), log_dir_(std::move(log_dir)) {}

  const GenConfig& default_config() const { return default_config_; }
  double default_soa_ms() const { return default_soa_ms_; }

  std::shared_ptr<Entry> add(Session s) {
    auto e = std::make_shared<Entry>();
    e->session = std::move(s);
    std::unique_lock lock(mu_);
    sessions_[e->session.id] = e;
    return e;
  }

  std::shared_ptr<Entry> get(const std::string& id) const {
    std::shared_lock lock(mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, "no session " + id);
    return it->second;
  }

  std::uint64_t next_counter() { return counter_++; }

  // caller holds the entry lock
  void persist(const Session& s) const {
    if (log_dir_.empty()) return;
    std::filesystem::create_directories(log_dir_);
    const auto path = std::filesystem::path(log_dir_) / (s.id + ".json");
    std::ofstream out(path, std::ios::binary);
    out << dump_record(session_log(s)) << '\n';
  }

 private:
  GenConfig default_config_;
  double default_soa_ms_;
  std::string log_dir_;
  mutable std::shared_mutex mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::atomic<std::uint64_t> counter_{0};
};

inline Json plan_json(const Session& s) {
  Json plan = Json::array();
  for (const auto& e : s.plan) plan.push_back(to_json(e));
  return plan;
}

inline const char* kPlaceholderPage =
    "<!doctype html><html><head><meta charset=\"utf-8\"><title>texinv</title></head>"
    "<body><p>texinv session server. POST /sessions to begin.</p></body></html>";

/// Registers the session endpoints on `server`. `static_dir` (optional) is
/// mounted at / for the viewer.
inline void install_routes(httplib::Server& server, SessionStore& store, const std::string& static_dir = {}) {
  auto send_json = [](httplib::Response& res, const Json& j, int status = 200) {
    res.status = status;
    res.set_content(dump_record(j), "application/json");
  };
  auto guarded = [send_json](auto fn) {
    return [fn, send_json](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res);
      } catch (const Error& e) {
        send_json(res, {{"error", to_string(e.code())}, {"message", e.what()}}, http_status(e.code()));
      } catch (const std::exception& e) {
        send_json(res, {{"error", "InvalidArgument"}, {"message", e.what()}}, 400);
      }
    };
  };
  auto body = [](const httplib::Request& req) {
    if (req.body.empty()) return Json::object();
    Json j = parse_record(req.body);
    if (!j.is_object()) throw Error(ErrorCode::SchemaMismatch, "request body must be an object");
    return j;
  };

  server.Post("/sessions", guarded([&store, send_json, body](const httplib::Request& req, httplib::Response& res) {
    const SessionParams params = params_from_json(body(req), store.default_config(), store.default_soa_ms());
    Session s = create_session(params, store.next_counter());
    auto entry = store.add(s);
    std::lock_guard lock(entry->mu);
    store.persist(entry->session);
    send_json(res, {{"session_id", entry->session.id},
                    {"plan", plan_json(entry->session)},
                    {"soa_ms", params.soa_ms},
                    {"window_ms", params.effective_window()}}, 201);
  }));

  server.Get(R"(/sessions/([A-Za-z0-9]+)/picture/(\d+))",
             guarded([&store](const httplib::Request& req, httplib::Response& res) {
               auto entry = store.get(req.matches[1]);
               const int k = std::stoi(req.matches[2]);
               std::lock_guard lock(entry->mu);
               const Session& s = entry->session;
               if (k < 0 || static_cast<std::size_t>(k) >= s.plan.size())
                 throw Error(ErrorCode::InvalidArgument, "picture index outside the plan");
               auto it = entry->png_cache.find(k);
               if (it == entry->png_cache.end())
                 it = entry->png_cache.emplace(k, picture_png(s.params, s.plan[k].token)).first;
               res.set_content(it->second, "image/png");
             }));

  server.Post(R"(/sessions/([A-Za-z0-9]+)/responses)",
              guarded([&store, send_json, body](const httplib::Request& req, httplib::Response& res) {
                auto entry = store.get(req.matches[1]);
                const Response r = response_from_json(body(req));
                std::lock_guard lock(entry->mu);
                record_response(entry->session, r);
                store.persist(entry->session);
                send_json(res, {{"recorded", entry->session.responses.size()}});
              }));

  server.Post(R"(/sessions/([A-Za-z0-9]+)/finish)",
              guarded([&store, send_json](const httplib::Request& req, httplib::Response& res) {
                auto entry = store.get(req.matches[1]);
                std::lock_guard lock(entry->mu);
                const auto selected = finish(entry->session);
                store.persist(entry->session);
                send_json(res, {{"selected", selected}});
              }));

  server.Post(R"(/sessions/([A-Za-z0-9]+)/selection)",
              guarded([&store, send_json, body](const httplib::Request& req, httplib::Response& res) {
                auto entry = store.get(req.matches[1]);
                const Json j = body(req);
                const auto& sel = detail::field(j, "selected");
                if (!sel.is_array()) detail::schema_error("selected must be a list");
                std::vector<int> picks;
                for (const auto& v : sel) picks.push_back(detail::integer(v));
                std::lock_guard lock(entry->mu);
                override_selection(entry->session, picks);
                store.persist(entry->session);
                send_json(res, {{"selected", entry->session.selected}});
              }));

  server.Post(R"(/sessions/([A-Za-z0-9]+)/iterate)",
              guarded([&store, send_json](const httplib::Request& req, httplib::Response& res) {
                auto entry = store.get(req.matches[1]);
                Session child;
                Json tokens = Json::array();
                {
                  std::lock_guard lock(entry->mu);
                  child = iterate_from_selection(entry->session, store.next_counter());
                  store.persist(entry->session);
                  for (const auto& t : entry->session.new_tokens) tokens.push_back(to_json(t));
                }
                auto added = store.add(child);
                std::lock_guard lock(added->mu);
                store.persist(added->session);
                send_json(res, {{"new_tokens", tokens}, {"session_id", child.id}, {"plan", plan_json(child)}});
              }));

  server.Get(R"(/sessions/([A-Za-z0-9]+)/log)",
             guarded([&store, send_json](const httplib::Request& req, httplib::Response& res) {
               auto entry = store.get(req.matches[1]);
               std::lock_guard lock(entry->mu);
               send_json(res, session_log(entry->session));
             }));

  if (!static_dir.empty() && server.set_mount_point("/", static_dir)) return;
  server.Get("/", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(kPlaceholderPage, "text/html");
  });
}

}  // namespace texinv
