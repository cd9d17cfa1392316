#pragma once

// Directory-per-project store for sources, drafts, analyses and the
// analysis history.
//
//   <root>/projects/<id>/project.json      immutable after creation
//   <root>/projects/<id>/history.json      commit point: draft count + analysis events
//   <root>/projects/<id>/drafts/<n>.txt
//   <root>/projects/<id>/analyses/<n>.json latest analysis of draft n
//
// Every file carries `schema: 1`. A write becomes visible only when
// history.json is replaced; Store's constructor rolls back or completes any
// write that a crash interrupted.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "coach/engine.hpp"
#include "coach/io.hpp"

namespace coach::session {

struct Project {
  std::string id;
  std::string source_text;
  std::optional<std::string> reference_abstract;
  std::string created_at;
  engine::ConfigSnapshot config;
  std::size_t draft_count = 0;

  nlohmann::json to_json() const;
};

struct DraftRecord {
  std::string project_id;
  std::size_t draft_no = 0;
  std::string text;
  std::optional<nlohmann::json> analysis;  // the analysis payload
  std::optional<std::string> analyzed_at;
  std::vector<std::string> warnings;       // set by analyze_draft only

  nlohmann::json to_json() const;
};

struct HistoryEntry {
  std::size_t seq = 0;
  std::size_t draft_no = 0;
  std::vector<std::string> organization;
  std::optional<double> overall;
  std::string analyzed_at;
};

// One row per analysis event, oldest first.
struct History {
  std::vector<HistoryEntry> entries;

  nlohmann::json to_json() const;  // {rows, overall, entries}
};

class Store {
 public:
  using Clock = std::function<std::string()>;

  // Creates the root if needed and recovers every project.
  explicit Store(std::filesystem::path root, io::FaultHook hook = {});

  const std::filesystem::path& root() const { return root_; }
  void set_clock(Clock clock) { clock_ = std::move(clock); }

  // Throws kEmptyInput for blank source text, kInvalidEncoding for bad UTF-8.
  Project create_project(std::string_view source_text, std::optional<std::string> reference_abstract,
                         const engine::ConfigSnapshot& config);

  // All reads and writes below throw kNotFound for unknown ids or drafts.
  Project project(const std::string& id) const;
  std::vector<std::string> project_ids() const;

  DraftRecord add_draft(const std::string& id, std::string_view text);
  DraftRecord draft(const std::string& id, std::size_t draft_no) const;

  // Runs organization + facets. Re-analysis replaces the stored analysis and
  // appends another history row. Engine errors leave the store unchanged.
  DraftRecord analyze_draft(const std::string& id, std::size_t draft_no, const engine::Engine& engine);

  History history(const std::string& id) const;

 private:
  struct Manifest {
    std::size_t draft_count = 0;
    std::vector<HistoryEntry> events;

    nlohmann::json to_json() const;
    static Manifest from_json(const nlohmann::json& j);
  };

  std::filesystem::path project_dir(const std::string& id) const;
  std::shared_mutex& lock_for(const std::string& id) const;
  void require_project(const std::string& id) const;
  Manifest read_manifest(const std::string& id) const;
  void write_manifest(const std::string& id, const Manifest& m) const;
  Project read_project(const std::string& id) const;
  void recover_project(const std::filesystem::path& dir) const;
  std::string now() const;

  std::filesystem::path root_;
  io::FaultHook hook_;
  Clock clock_;
  mutable std::mutex locks_mutex_;
  mutable std::map<std::string, std::shared_ptr<std::shared_mutex>> locks_;
};

// Stable identifier check: 1-64 characters from [A-Za-z0-9_-].
bool is_valid_project_id(std::string_view id);

}  // namespace coach::session
