#include <gtest/gtest.h>

#include <httplib.h>

#include <filesystem>
#include <future>
#include <memory>
#include <stdexcept>
#include <thread>

#include "coach/io.hpp"
#include "coach/service.hpp"
#include "support.hpp"

namespace coach::service {
namespace {

namespace fs = std::filesystem;
using coach::testing::data_dir;

const engine::Engine& shipped() {
  static const engine::Engine engine = engine::Engine::load(data_dir() / "config.json");
  return engine;
}

std::string fixture(const char* name) { return io::read_file(data_dir() / "fixtures" / name); }

Request get(std::string path, std::map<std::string, std::string> query = {}) {
  return {"GET", std::move(path), std::move(query), ""};
}

Request post(std::string path, const nlohmann::json& body) {
  return {"POST", std::move(path), {}, body.is_null() ? "" : body.dump()};
}

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("coach-service-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    store_ = std::make_unique<session::Store>(root_);
    store_->set_clock([] { return std::string("2026-01-01T00:00:00Z"); });
    service_ = std::make_unique<Service>(shipped(), *store_);
  }
  void TearDown() override { fs::remove_all(root_); }

  std::string create(bool with_reference = true) {
    nlohmann::json body = {{"source_text", fixture("intro.txt")}};
    if (with_reference) body["reference_abstract"] = fixture("reference.txt");
    const auto r = service_->handle(post("/v1/projects", body));
    EXPECT_EQ(r.status, 201) << r.body.dump();
    return r.body.at("project_id").get<std::string>();
  }

  static void expect_error(const Response& r, int status, const std::string& code,
                           const std::optional<std::string>& field = std::nullopt) {
    EXPECT_EQ(r.status, status) << r.body.dump();
    EXPECT_EQ(r.body.at("code"), code) << r.body.dump();
    EXPECT_TRUE(r.body.at("message").is_string());
    if (field) {
      EXPECT_EQ(r.body.value("field", ""), *field) << r.body.dump();
    }
  }

  fs::path root_;
  std::unique_ptr<session::Store> store_;
  std::unique_ptr<Service> service_;
};

TEST_F(ServiceTest, ProjectDraftAnalyzeHistoryFlow) {
  const auto id = create();
  const auto project = service_->handle(get("/v1/projects/" + id));
  EXPECT_EQ(project.status, 200);
  EXPECT_EQ(project.body.at("draft_count"), 0);
  EXPECT_EQ(project.body.at("source_text"), fixture("intro.txt"));

  const auto added = service_->handle(post("/v1/projects/" + id + "/drafts", {{"text", fixture("draft.txt")}}));
  EXPECT_EQ(added.status, 201);
  EXPECT_EQ(added.body.at("draft_no"), 1);

  const auto analyzed = service_->handle(post("/v1/projects/" + id + "/drafts/1/analyze", nullptr));
  EXPECT_EQ(analyzed.status, 200);
  EXPECT_TRUE(analyzed.warnings.empty());
  EXPECT_EQ(analyzed.body, io::read_json(data_dir() / "fixtures" / "golden_analysis.json"));

  const auto again = service_->handle(post("/v1/projects/" + id + "/drafts/1/analyze", nullptr));
  ASSERT_EQ(again.warnings.size(), 1u);

  const auto draft = service_->handle(get("/v1/projects/" + id + "/drafts/1"));
  EXPECT_EQ(draft.status, 200);
  EXPECT_EQ(draft.body.at("analysis"), analyzed.body);

  const auto history = service_->handle(get("/v1/projects/" + id + "/history"));
  EXPECT_EQ(history.status, 200);
  EXPECT_EQ(history.body.at("rows").size(), 2u);
  EXPECT_EQ(history.body.at("entries")[1].at("seq"), 2);
}

TEST_F(ServiceTest, RstRouteHonorsQuery) {
  const auto id = create();
  const auto full = service_->handle(get("/v1/projects/" + id + "/rst"));
  EXPECT_EQ(full.status, 200);
  EXPECT_EQ(full.body.at("units").size(), shipped().parse_text(fixture("intro.txt")).sentences.size());
  const auto p0 = service_->handle(get("/v1/projects/" + id + "/rst", {{"scope", "paragraph_0"}}));
  EXPECT_EQ(p0.status, 200);
  EXPECT_LT(p0.body.at("units").size(), full.body.at("units").size());
  expect_error(service_->handle(get("/v1/projects/" + id + "/rst", {{"scope", "paragraph_99"}})), 422,
               "IndexError");
  expect_error(service_->handle(get("/v1/projects/" + id + "/rst", {{"parser", "gold"}})), 422,
               "AnalysisUnavailable");
}

TEST_F(ServiceTest, ReferenceRoute) {
  const auto id = create();
  const auto r = service_->handle(get("/v1/projects/" + id + "/reference", {{"k", "2"}}));
  ASSERT_EQ(r.status, 200) << r.body.dump();
  const auto n_abstract = r.body.at("abstract_sentences").size();
  EXPECT_EQ(r.body.at("organization").size(), n_abstract);
  EXPECT_EQ(r.body.at("alignment").at("k"), 2);
  EXPECT_EQ(r.body.at("alignment").at("topk_idx").size(), n_abstract);
  EXPECT_EQ(r.body.at("alignment").at("topk_idx")[0].size(), 2u);
  EXPECT_EQ(r.body.at("alignment").at("sim")[0].size(), r.body.at("source_sentences").size());

  const auto dflt = service_->handle(get("/v1/projects/" + id + "/reference"));
  EXPECT_EQ(dflt.body.at("alignment").at("k"), shipped().config().k);

  expect_error(service_->handle(get("/v1/projects/" + id + "/reference", {{"k", "0"}})), 422, "InvalidK",
               "k");
  expect_error(service_->handle(get("/v1/projects/" + id + "/reference", {{"k", "x"}})), 422,
               "InvalidArgument", "k");
  const auto bare = create(false);
  expect_error(service_->handle(get("/v1/projects/" + bare + "/reference")), 422, "AnalysisUnavailable",
               "reference_abstract");
}

TEST_F(ServiceTest, ExtractivePrompt) {
  const auto id = create();
  const auto r = service_->handle(post("/v1/projects/" + id + "/prompt", {{"target_count", 2}}));
  ASSERT_EQ(r.status, 200) << r.body.dump();
  EXPECT_EQ(r.body.at("generator"), "extractive");
  EXPECT_EQ(r.body.at("sentences").size(), 2u);
  const auto dflt = service_->handle(post("/v1/projects/" + id + "/prompt", nullptr));
  EXPECT_EQ(dflt.body.at("sentences").size(), shipped().config().draft.target_count);
  expect_error(service_->handle(post("/v1/projects/" + id + "/prompt", {{"target_count", 0}})), 422,
               "InvalidArgument", "target_count");
  expect_error(service_->handle(post("/v1/projects/" + id + "/prompt", {{"target_count", -1}})), 422,
               "InvalidArgument", "target_count");
}

TEST_F(ServiceTest, AbstractivePromptAndFallback) {
  const auto id = create();
  std::size_t seen_tokens = 0;
  service_->set_abstractive(
      [&](const std::string&, std::size_t max_tokens) {
        seen_tokens = max_tokens;
        return std::string("A generated abstract.");
      },
      64);
  const auto r = service_->handle(post("/v1/projects/" + id + "/prompt", nullptr));
  EXPECT_EQ(r.body.at("generator"), "abstractive");
  EXPECT_EQ(r.body.at("text"), "A generated abstract.");
  EXPECT_EQ(seen_tokens, 64u);
  EXPECT_TRUE(r.warnings.empty());

  service_->set_abstractive(
      [](const std::string&, std::size_t) -> std::string { throw std::runtime_error("timeout"); }, 64);
  const auto fb = service_->handle(post("/v1/projects/" + id + "/prompt", nullptr));
  EXPECT_EQ(fb.status, 200);
  EXPECT_EQ(fb.body.at("generator"), "extractive");
  ASSERT_EQ(fb.warnings.size(), 1u);
  EXPECT_NE(fb.warnings[0].find("timeout"), std::string::npos);
}

TEST_F(ServiceTest, AbstractiveClientFailureFallsBack) {
  const auto id = create();
  // Nothing listens on port 1.
  service_->set_abstractive(make_abstractive_client({{"url", "http://127.0.0.1:1/generate"}, {"timeout_ms", 200}}),
                            32);
  const auto r = service_->handle(post("/v1/projects/" + id + "/prompt", nullptr));
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body.at("generator"), "extractive");
  EXPECT_EQ(r.warnings.size(), 1u);
}

TEST_F(ServiceTest, Strategies) {
  const auto r = service_->handle(get("/v1/strategies"));
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body.at("format"), "markdown");
  EXPECT_EQ(r.body.at("text"), shipped().strategies());
}

TEST_F(ServiceTest, ErrorMapping) {
  expect_error(service_->handle(get("/v1/projects/unknown")), 404, "NotFound");
  expect_error(service_->handle(get("/v1/nothing")), 404, "NotFound");
  expect_error(service_->handle(get("/v2/projects")), 404, "NotFound");
  expect_error(service_->handle(post("/v1/projects", {{"source_text", "  "}})), 422, "EmptyInput",
               "source_text");
  expect_error(service_->handle(post("/v1/projects", {{"source_text", 3}})), 422, "InvalidArgument",
               "source_text");
  expect_error(service_->handle({"POST", "/v1/projects", {}, "{not json"}), 422, "FormatError", "body");
  expect_error(service_->handle({"POST", "/v1/projects", {}, "[1]"}), 422, "FormatError", "body");

  const auto id = create();
  expect_error(service_->handle(get("/v1/projects/" + id + "/drafts/1")), 404, "NotFound", "draft_no");
  expect_error(service_->handle(get("/v1/projects/" + id + "/drafts/abc")), 422, "InvalidArgument",
               "draft_no");
  expect_error(service_->handle(post("/v1/projects/" + id + "/drafts", {{"text", ""}})), 422, "EmptyInput",
               "text");
  expect_error(service_->handle(post("/v1/projects/" + id + "/drafts/9/analyze", nullptr)), 404, "NotFound");
  expect_error(service_->handle(get("/v1/projects/" + id + "/history/extra")), 404, "NotFound");

  const auto io = error_response(Error(ErrorCode::kIoError, "disk full"));
  EXPECT_EQ(io.status, 500);
  EXPECT_FALSE(io.body.contains("field"));
}

TEST_F(ServiceTest, HttpListenerCarriesWarningHeaders) {
  std::promise<std::pair<std::uint16_t, std::function<void()>>> ready;
  ServeOptions options;
  options.port = 0;
  options.on_ready = [&](std::uint16_t port, std::function<void()> stop) {
    ready.set_value({port, std::move(stop)});
  };
  std::thread listener([&] { serve(*service_, options); });
  auto [port, stop] = ready.get_future().get();

  httplib::Client client("127.0.0.1", port);
  const auto created = client.Post("/v1/projects", nlohmann::json{{"source_text", fixture("intro.txt")}}.dump(),
                                   "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  const auto id = nlohmann::json::parse(created->body).at("project_id").get<std::string>();
  client.Post("/v1/projects/" + id + "/drafts", nlohmann::json{{"text", fixture("draft.txt")}}.dump(),
              "application/json");
  const auto first = client.Post("/v1/projects/" + id + "/drafts/1/analyze", "", "application/json");
  ASSERT_TRUE(first);
  EXPECT_EQ(first->status, 200);
  EXPECT_FALSE(first->has_header("X-Coach-Warning"));
  const auto second = client.Post("/v1/projects/" + id + "/drafts/1/analyze", "", "application/json");
  ASSERT_TRUE(second);
  EXPECT_EQ(second->get_header_value_count("X-Coach-Warning"), 1u);

  const auto ref = client.Get("/v1/projects/" + id + "/rst?scope=paragraph_0");
  ASSERT_TRUE(ref);
  EXPECT_EQ(ref->status, 200);
  const auto missing = client.Get("/v1/projects/nope");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  EXPECT_EQ(nlohmann::json::parse(missing->body).at("code"), "NotFound");

  stop();
  listener.join();
}

}  // namespace
}  // namespace coach::service
