#include <gtest/gtest.h>

#include <filesystem>
#include <thread>

#include <unistd.h>

#include "texinv/http_server.hpp"
#include "texinv/records.hpp"

using namespace texinv;

namespace {

class Server : public ::testing::Test {
 protected:
  void SetUp() override {
    log_dir_ = std::filesystem::temp_directory_path() / ("texinv_http_" + std::to_string(::getpid()));
    std::filesystem::remove_all(log_dir_);
    GenConfig config = GenConfig::for_size(128, 96);
    store_ = std::make_unique<SessionStore>(config, 250.0, log_dir_.string());
    install_routes(server_, *store_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  void TearDown() override {
    server_.stop();
    thread_.join();
    std::filesystem::remove_all(log_dir_);
  }

  httplib::Client client() const { return httplib::Client("127.0.0.1", port_); }

  Json post(const std::string& path, const Json& body, int expect) {
    auto res = client().Post(path, dump_record(body), "application/json");
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expect) << path << " " << res->body;
    return Json::parse(res->body);
  }

  Json get_json(const std::string& path, int expect = 200) {
    auto res = client().Get(path);
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expect) << path;
    return Json::parse(res->body);
  }

  std::filesystem::path log_dir_;
  std::unique_ptr<SessionStore> store_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

Json press(int index, double t) { return {{"onset_index", index}, {"t_response_ms", t}, {"key", " "}}; }

}  // namespace

TEST_F(Server, FullLoop) {
  const Json created = post("/sessions", {{"seed", 5}, {"n_pictures", 6}, {"soa_ms", 200}}, 201);
  const std::string id = created["session_id"];
  ASSERT_EQ(created["plan"].size(), 6u);
  EXPECT_EQ(created["plan"][3]["onset_ms"].get<double>(), 600.0);
  EXPECT_EQ(created["window_ms"].get<double>(), 600.0);

  auto png = client().Get("/sessions/" + id + "/picture/2");
  ASSERT_TRUE(png);
  EXPECT_EQ(png->status, 200);
  EXPECT_EQ(png->get_header_value("Content-Type"), "image/png");
  EXPECT_EQ(png->body.substr(1, 3), "PNG");
  auto again = client().Get("/sessions/" + id + "/picture/2");
  EXPECT_EQ(again->body, png->body);
  EXPECT_EQ(client().Get("/sessions/" + id + "/picture/6")->status, 400);

  EXPECT_EQ(post("/sessions/" + id + "/responses", press(1, 380), 200)["recorded"], 1);
  EXPECT_EQ(post("/sessions/" + id + "/responses", press(1, 380), 200)["recorded"], 1);
  post("/sessions/" + id + "/responses", press(4, 850), 200);
  EXPECT_EQ(post("/sessions/" + id + "/finish", Json::object(), 200)["selected"], (std::vector<int>{1, 4}));
  EXPECT_EQ(post("/sessions/" + id + "/responses", press(5, 1100), 409)["error"], "PhaseViolation");

  const Json it = post("/sessions/" + id + "/iterate", Json::object(), 200);
  ASSERT_EQ(it["new_tokens"].size(), 2u);
  EXPECT_EQ(it["new_tokens"][0]["iteration"], 5);
  const std::string child = it["session_id"];
  EXPECT_EQ(it["plan"].size(), 2u);

  const Json log = get_json("/sessions/" + id + "/log");
  EXPECT_EQ(log["phase"], "iterated");
  EXPECT_EQ(log["child"], child);
  EXPECT_TRUE(verify_session_log(log));
  EXPECT_EQ(get_json("/sessions/" + child + "/log")["parent"], id);

  // the log directory mirrors the served log
  const std::string on_disk = read_text_file((log_dir_ / (id + ".json")).string());
  EXPECT_EQ(parse_record(on_disk), log);
  EXPECT_TRUE(std::filesystem::exists(log_dir_ / (child + ".json")));
}

TEST_F(Server, ErrorStatuses) {
  EXPECT_EQ(get_json("/sessions/nosuch/log", 404)["error"], "UnknownSession");
  post("/sessions/nosuch/finish", Json::object(), 404);
  EXPECT_EQ(post("/sessions", {{"seed", 1}, {"n_pictures", 3}, {"soa_ms", 50}}, 400)["error"], "InvalidArgument");
  post("/sessions", {{"n_pictures", 3}}, 400);
  auto bad = client().Post("/sessions", "{not json", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);

  const std::string id = post("/sessions", {{"seed", 2}, {"n_pictures", 3}}, 201)["session_id"];
  post("/sessions/" + id + "/iterate", Json::object(), 409);
  post("/sessions/" + id + "/finish", Json::object(), 200);
  EXPECT_EQ(post("/sessions/" + id + "/iterate", Json::object(), 422)["error"], "EmptySelection");
  EXPECT_EQ(post("/sessions/" + id + "/selection", {{"selected", {2}}}, 200)["selected"], (std::vector<int>{2}));
  post("/sessions/" + id + "/selection", {{"selected", {7}}}, 400);
  post("/sessions/" + id + "/iterate", Json::object(), 200);
}

TEST_F(Server, ConfigOverridesAndDefaults) {
  const Json a = post("/sessions", {{"seed", 3}, {"n_pictures", 2}}, 201);
  EXPECT_EQ(a["soa_ms"].get<double>(), 250.0);
  const Json log = get_json("/sessions/" + a["session_id"].get<std::string>() + "/log");
  EXPECT_EQ(log["params"]["config"]["width"], 128);
  const Json b = post("/sessions", {{"seed", 3}, {"n_pictures", 2}, {"config", {{"width", 64}}}}, 201);
  EXPECT_NE(a["session_id"], b["session_id"]);
  const Json blog = get_json("/sessions/" + b["session_id"].get<std::string>() + "/log");
  EXPECT_EQ(blog["params"]["config"]["width"], 64);
  EXPECT_EQ(blog["params"]["config"]["height"], 96);
}

TEST_F(Server, ConcurrentResponsesAreSerialized) {
  const std::string id = post("/sessions", {{"seed", 8}, {"n_pictures", 10}, {"soa_ms", 100}}, 201)["session_id"];
  std::vector<std::thread> workers;
  for (int w = 0; w < 4; ++w)
    workers.emplace_back([&, w] {
      auto c = client();
      for (int i = 0; i < 10; ++i) c.Post("/sessions/" + id + "/responses", dump_record(press(i, i * 100.0 + w)), "application/json");
    });
  for (auto& t : workers) t.join();
  const Json log = get_json("/sessions/" + id + "/log");
  EXPECT_EQ(log["responses"].size(), 40u);
  EXPECT_EQ(post("/sessions/" + id + "/finish", Json::object(), 200)["selected"].size(), 10u);
}

TEST_F(Server, RootServesAPage) {
  auto res = client().Get("/");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_NE(res->body.find("<html"), std::string::npos);
}

TEST(StaticMount, ServesViewerAssets) {
  const auto dir = std::filesystem::temp_directory_path() / ("texinv_static_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  write_text_file((dir / "index.html").string(), "<html>viewer</html>");
  SessionStore store;
  httplib::Server server;
  install_routes(server, store, dir.string());
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client c("127.0.0.1", port);
  auto res = c.Get("/index.html");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->body, "<html>viewer</html>");
  EXPECT_EQ(c.Post("/sessions", R"({"seed": 1, "n_pictures": 2})", "application/json")->status, 201);
  server.stop();
  t.join();
  std::filesystem::remove_all(dir);
}
