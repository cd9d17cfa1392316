#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <memory>
#include <set>

#include "coach/engine.hpp"
#include "coach/error.hpp"
#include "coach/io.hpp"
#include "coach/session.hpp"
#include "crash_harness.hpp"
#include "support.hpp"

namespace coach::session {
namespace {

namespace fs = std::filesystem;
using coach::testing::data_dir;

const engine::Engine& shipped() {
  static const engine::Engine engine = engine::Engine::load(data_dir() / "config.json");
  return engine;
}

std::string fixture(const char* name) { return io::read_file(data_dir() / "fixtures" / name); }

class StoreTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("coach-session-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  std::unique_ptr<Store> open() {
    auto s = std::make_unique<Store>(root_);
    s->set_clock([] { return std::string(coach::testing::kFixedTime); });
    return s;
  }

  static void expect_code(ErrorCode code, const std::function<void()>& f) {
    try {
      f();
      FAIL() << "no error";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), code) << e.what();
    }
  }

  fs::path root_;
};

TEST_F(StoreTest, CreateAddAnalyzeRoundTrip) {
  auto store_ptr = open();
  Store& store = *store_ptr;
  const auto p = store.create_project(fixture("intro.txt"), fixture("reference.txt"), shipped().snapshot());
  EXPECT_TRUE(is_valid_project_id(p.id));
  EXPECT_EQ(p.created_at, coach::testing::kFixedTime);
  EXPECT_EQ(store.project_ids(), std::vector<std::string>{p.id});

  const auto d = store.add_draft(p.id, fixture("draft.txt"));
  EXPECT_EQ(d.draft_no, 1u);
  EXPECT_FALSE(store.draft(p.id, 1).analysis);

  const auto a = store.analyze_draft(p.id, 1, shipped());
  ASSERT_TRUE(a.analysis);
  EXPECT_TRUE(a.warnings.empty());
  const auto golden = io::read_json(data_dir() / "fixtures" / "golden_analysis.json");
  EXPECT_EQ(*a.analysis, golden);

  // A fresh store sees the same data.
  auto again_ptr = open();
  Store& again = *again_ptr;
  const auto back = again.project(p.id);
  EXPECT_EQ(back.source_text, fixture("intro.txt"));
  EXPECT_EQ(back.reference_abstract, fixture("reference.txt"));
  EXPECT_EQ(back.draft_count, 1u);
  EXPECT_EQ(back.config, shipped().snapshot());
  const auto stored = again.draft(p.id, 1);
  EXPECT_EQ(stored.text, fixture("draft.txt"));
  EXPECT_EQ(*stored.analysis, golden);
  EXPECT_EQ(stored.analyzed_at, std::optional<std::string>(coach::testing::kFixedTime));

  const auto h = again.history(p.id);
  ASSERT_EQ(h.entries.size(), 1u);
  EXPECT_EQ(h.entries[0].seq, 1u);
  EXPECT_EQ(h.entries[0].organization.size(), golden.at("organization").at("labels").size());
  EXPECT_DOUBLE_EQ(*h.entries[0].overall, golden.at("facets").at("overall").get<double>());
}

TEST_F(StoreTest, HistoryFollowsAnalysisOrder) {
  auto store_ptr = open();
  Store& store = *store_ptr;
  const auto id = store.create_project(fixture("intro.txt"), std::nullopt, shipped().snapshot()).id;
  store.add_draft(id, fixture("draft.txt"));
  store.add_draft(id, "We propose a tool. It helps reviewers. We evaluate it with users.");
  store.analyze_draft(id, 2, shipped());
  store.analyze_draft(id, 1, shipped());
  const auto again = store.analyze_draft(id, 2, shipped());
  ASSERT_EQ(again.warnings.size(), 1u);
  EXPECT_NE(again.warnings[0].find("replaced"), std::string::npos);

  const auto h = store.history(id);
  ASSERT_EQ(h.entries.size(), 3u);
  std::vector<std::size_t> order;
  for (const auto& e : h.entries) order.push_back(e.draft_no);
  EXPECT_EQ(order, (std::vector<std::size_t>{2, 1, 2}));
  EXPECT_EQ(h.entries[2].seq, 3u);
  const auto j = h.to_json();
  EXPECT_EQ(j.at("rows").size(), 3u);
  EXPECT_EQ(j.at("overall").size(), 3u);
  EXPECT_EQ(*store.draft(id, 2).analysis, *again.analysis);
}

TEST_F(StoreTest, ProjectIdsAreDistinct) {
  auto store_ptr = open();
  Store& store = *store_ptr;
  std::set<std::string> ids;
  for (int i = 0; i < 20; ++i) ids.insert(store.create_project("Some source.", std::nullopt, {}).id);
  EXPECT_EQ(ids.size(), 20u);
  EXPECT_EQ(store.project_ids().size(), 20u);
}

TEST_F(StoreTest, UnknownIdsAndDraftsAreNotFound) {
  auto store_ptr = open();
  Store& store = *store_ptr;
  const auto id = store.create_project("Some source.", std::nullopt, {}).id;
  expect_code(ErrorCode::kNotFound, [&] { store.project("nope"); });
  expect_code(ErrorCode::kNotFound, [&] { store.project("../etc"); });
  expect_code(ErrorCode::kNotFound, [&] { store.add_draft("nope", "Text."); });
  expect_code(ErrorCode::kNotFound, [&] { store.history("nope"); });
  expect_code(ErrorCode::kNotFound, [&] { store.draft(id, 1); });
  expect_code(ErrorCode::kNotFound, [&] { store.draft(id, 0); });
  expect_code(ErrorCode::kNotFound, [&] { store.analyze_draft(id, 1, shipped()); });
}

TEST_F(StoreTest, RejectsEmptyAndInvalidText) {
  auto store_ptr = open();
  Store& store = *store_ptr;
  expect_code(ErrorCode::kEmptyInput, [&] { store.create_project(" \n\t", std::nullopt, {}); });
  expect_code(ErrorCode::kInvalidEncoding, [&] { store.create_project("bad \xff", std::nullopt, {}); });
  const auto id = store.create_project("Some source.", std::nullopt, {}).id;
  expect_code(ErrorCode::kEmptyInput, [&] { store.add_draft(id, "   "); });
  expect_code(ErrorCode::kInvalidEncoding, [&] { store.add_draft(id, "\xc3"); });
  EXPECT_EQ(store.project(id).draft_count, 0u);
}

TEST_F(StoreTest, ConfigMismatchWarns) {
  auto store_ptr = open();
  Store& store = *store_ptr;
  engine::ConfigSnapshot other = shipped().snapshot();
  other.k += 1;
  const auto id = store.create_project(fixture("intro.txt"), std::nullopt, other).id;
  store.add_draft(id, fixture("draft.txt"));
  const auto r = store.analyze_draft(id, 1, shipped());
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("configuration"), std::string::npos);
}

TEST_F(StoreTest, EngineErrorLeavesStoreUnchanged) {
  const fs::path cfg_dir = root_ / "cfg";
  fs::create_directories(cfg_dir);
  auto j = io::read_json(data_dir() / "config.json");
  for (const char* k : {"function_words", "abbreviations", "relations", "weights", "guidance", "strategies"}) {
    j[k] = (data_dir() / j[k].get<std::string>()).string();
  }
  for (auto& [k, v] : j["lexicons"].items()) v = (data_dir() / v.get<std::string>()).string();
  for (auto& [k, v] : j["gold"].items()) v = (data_dir() / v.get<std::string>()).string();
  j["genre_model"] = (cfg_dir / "missing.json").string();
  std::ofstream(cfg_dir / "config.json") << j.dump(2);
  const auto broken = engine::Engine::load(cfg_dir / "config.json");

  auto store_ptr = open();
  Store& store = *store_ptr;
  const auto id = store.create_project(fixture("intro.txt"), std::nullopt, shipped().snapshot()).id;
  store.add_draft(id, fixture("draft.txt"));
  const auto before = coach::testing::store_snapshot(root_);
  expect_code(ErrorCode::kAnalysisUnavailable, [&] { store.analyze_draft(id, 1, broken); });
  EXPECT_EQ(coach::testing::store_snapshot(root_), before);
  EXPECT_TRUE(coach::testing::store_leftovers(root_).empty());
}

TEST_F(StoreTest, RecoveryDiscardsUncommittedFiles) {
  auto store_ptr = open();
  Store& store = *store_ptr;
  const auto id = store.create_project("Some source.", std::nullopt, {}).id;
  store.add_draft(id, "First draft.");
  const fs::path dir = root_ / "projects" / id;
  std::ofstream(dir / "drafts" / "2.txt") << "never committed";
  std::ofstream(dir / "history.json.tmp") << "{ torn";
  std::ofstream(dir / "analyses" / "1.json.next") << "{ torn";
  fs::create_directories(root_ / "projects" / ".staging-abc" / "drafts");

  auto reopened_ptr = open();
  Store& reopened = *reopened_ptr;
  EXPECT_EQ(reopened.project_ids(), std::vector<std::string>{id});
  EXPECT_EQ(reopened.project(id).draft_count, 1u);
  EXPECT_FALSE(fs::exists(dir / "drafts" / "2.txt"));
  EXPECT_TRUE(coach::testing::store_leftovers(root_).empty());
  EXPECT_FALSE(reopened.draft(id, 1).analysis);
}

TEST_F(StoreTest, RecoveryPromotesCommittedStagedAnalysis) {
  auto store_ptr = open();
  Store& store = *store_ptr;
  const auto id = store.create_project(fixture("intro.txt"), std::nullopt, shipped().snapshot()).id;
  store.add_draft(id, fixture("draft.txt"));
  store.analyze_draft(id, 1, shipped());
  // Simulate a crash between the manifest commit and the rename.
  const fs::path analyses = root_ / "projects" / id / "analyses";
  fs::rename(analyses / "1.json", analyses / "1.json.next");

  auto reopened_ptr = open();
  Store& reopened = *reopened_ptr;
  EXPECT_TRUE(fs::exists(analyses / "1.json"));
  EXPECT_TRUE(reopened.draft(id, 1).analysis);
}

TEST_F(StoreTest, IncompleteProjectDirectoryIsAnIoError) {
  fs::create_directories(root_ / "projects" / "broken");
  expect_code(ErrorCode::kIoError, [&] { Store s(root_); });
}

TEST(ProjectId, Validation) {
  EXPECT_TRUE(is_valid_project_id("abc-DEF_123"));
  EXPECT_FALSE(is_valid_project_id(""));
  EXPECT_FALSE(is_valid_project_id("a/b"));
  EXPECT_FALSE(is_valid_project_id(".."));
  EXPECT_FALSE(is_valid_project_id(std::string(65, 'a')));
}

TEST(CrashSafety, RandomKillPointsReloadToCommittedState) {
  const coach::testing::ScenarioText text{fixture("intro.txt"),
                                          {fixture("draft.txt"), "We propose a tool. It helps reviewers."}};
  const auto ops = coach::testing::crash_scenario(3);
  const auto report = coach::testing::run_crash_trials(
      shipped(), text, ops, fs::temp_directory_path() / "coach-session-crash", 30, 7);
  EXPECT_GE(report.total_steps, 30u);
  EXPECT_EQ(report.trials, 30u);
  for (const auto& f : report.failures) ADD_FAILURE() << f;
}

}  // namespace
}  // namespace coach::session
