#include "coach/session.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <random>

#include "coach/error.hpp"
#include "coach/text.hpp"

namespace coach::session {
namespace fs = std::filesystem;
namespace {

constexpr const char* kStagingPrefix = ".staging-";

std::string random_id() {
  static std::mutex mu;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mu);
  static constexpr char kHex[] = "0123456789abcdef";
  std::uint64_t v = rng();
  std::string id(16, '0');
  for (auto& c : id) {
    c = kHex[v & 0xf];
    v >>= 4;
  }
  return id;
}

nlohmann::json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

bool parse_draft_file_name(const std::string& name, std::string_view suffix, std::size_t& n) {
  if (name.size() <= suffix.size() || name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0) {
    return false;
  }
  const std::string digits = name.substr(0, name.size() - suffix.size());
  if (digits.empty() || digits.size() > 9 ||
      digits.find_first_not_of("0123456789") != std::string::npos) {
    return false;
  }
  n = std::stoul(digits);
  return true;
}

}  // namespace

bool is_valid_project_id(std::string_view id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

// --- serialization ------------------------------------------------------------------------

nlohmann::json Project::to_json() const {
  return {{"schema", 1},
          {"id", id},
          {"created_at", created_at},
          {"source_text", source_text},
          {"reference_abstract",
           reference_abstract ? nlohmann::json(*reference_abstract) : nlohmann::json(nullptr)},
          {"config", config.to_json()},
          {"draft_count", draft_count}};
}

nlohmann::json DraftRecord::to_json() const {
  return {{"project_id", project_id},
          {"draft_no", draft_no},
          {"text", text},
          {"analysis", analysis ? *analysis : nlohmann::json(nullptr)},
          {"analyzed_at", analyzed_at ? nlohmann::json(*analyzed_at) : nlohmann::json(nullptr)},
          {"warnings", warnings}};
}

nlohmann::json History::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  nlohmann::json overall = nlohmann::json::array();
  nlohmann::json list = nlohmann::json::array();
  for (const auto& e : entries) {
    rows.push_back(e.organization);
    overall.push_back(optional_number(e.overall));
    list.push_back({{"seq", e.seq},
                    {"draft_no", e.draft_no},
                    {"organization", e.organization},
                    {"overall", optional_number(e.overall)},
                    {"analyzed_at", e.analyzed_at}});
  }
  return {{"rows", std::move(rows)}, {"overall", std::move(overall)}, {"entries", std::move(list)}};
}

nlohmann::json Store::Manifest::to_json() const {
  nlohmann::json events_json = nlohmann::json::array();
  for (const auto& e : events) {
    events_json.push_back({{"seq", e.seq},
                           {"draft_no", e.draft_no},
                           {"organization", e.organization},
                           {"overall", optional_number(e.overall)},
                           {"analyzed_at", e.analyzed_at}});
  }
  return {{"schema", 1}, {"draft_count", draft_count}, {"events", std::move(events_json)}};
}

Store::Manifest Store::Manifest::from_json(const nlohmann::json& j) {
  if (j.value("schema", 0) != 1) throw Error(ErrorCode::kFormatError, "history needs schema 1");
  Manifest m;
  try {
    m.draft_count = j.at("draft_count").get<std::size_t>();
    for (const auto& e : j.at("events")) {
      HistoryEntry h;
      h.seq = e.at("seq").get<std::size_t>();
      h.draft_no = e.at("draft_no").get<std::size_t>();
      h.organization = e.at("organization").get<std::vector<std::string>>();
      if (!e.at("overall").is_null()) h.overall = e.at("overall").get<double>();
      h.analyzed_at = e.at("analyzed_at").get<std::string>();
      m.events.push_back(std::move(h));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("bad history file: ") + e.what());
  }
  return m;
}

// --- store ---------------------------------------------------------------------------------

Store::Store(fs::path root, io::FaultHook hook) : root_(std::move(root)), hook_(std::move(hook)) {
  fs::create_directories(root_ / "projects");
  for (const auto& entry : fs::directory_iterator(root_ / "projects")) {
    const std::string name = entry.path().filename().string();
    if (name.rfind(kStagingPrefix, 0) == 0) {
      fs::remove_all(entry.path());
      continue;
    }
    if (entry.is_directory()) recover_project(entry.path());
  }
  io::fsync_directory(root_ / "projects");
}

std::string Store::now() const {
  if (clock_) return clock_();
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

fs::path Store::project_dir(const std::string& id) const { return root_ / "projects" / id; }

std::shared_mutex& Store::lock_for(const std::string& id) const {
  std::lock_guard guard(locks_mutex_);
  auto& slot = locks_[id];
  if (!slot) slot = std::make_shared<std::shared_mutex>();
  return *slot;
}

void Store::require_project(const std::string& id) const {
  if (!is_valid_project_id(id) || !fs::exists(project_dir(id) / "project.json")) {
    throw Error(ErrorCode::kNotFound, "project '" + id + "' not found").with_field("project_id");
  }
}

Store::Manifest Store::read_manifest(const std::string& id) const {
  return Manifest::from_json(io::read_json(project_dir(id) / "history.json"));
}

void Store::write_manifest(const std::string& id, const Manifest& m) const {
  io::write_file_atomic(project_dir(id) / "history.json", m.to_json().dump(2) + "\n", hook_);
}

Project Store::read_project(const std::string& id) const {
  const auto j = io::read_json(project_dir(id) / "project.json");
  if (j.value("schema", 0) != 1) throw Error(ErrorCode::kFormatError, "project file needs schema 1");
  Project p;
  try {
    p.id = j.at("id").get<std::string>();
    p.created_at = j.at("created_at").get<std::string>();
    p.source_text = j.at("source_text").get<std::string>();
    if (!j.at("reference_abstract").is_null()) {
      p.reference_abstract = j.at("reference_abstract").get<std::string>();
    }
    p.config = engine::ConfigSnapshot::from_json(j.at("config"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("bad project file: ") + e.what());
  }
  p.draft_count = read_manifest(id).draft_count;
  return p;
}

void Store::recover_project(const fs::path& dir) const {
  const fs::path manifest_path = dir / "history.json";
  if (!fs::exists(dir / "project.json") || !fs::exists(manifest_path)) {
    throw Error(ErrorCode::kIoError, "project directory " + dir.string() + " is incomplete");
  }
  std::vector<fs::path> leftovers;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".tmp") leftovers.push_back(entry.path());
  }
  for (const auto& p : leftovers) fs::remove(p);
  const Manifest m = Manifest::from_json(io::read_json(manifest_path));

  for (const auto& entry : fs::directory_iterator(dir / "drafts")) {
    std::size_t n = 0;
    if (parse_draft_file_name(entry.path().filename().string(), ".txt", n) && n > m.draft_count) {
      fs::remove(entry.path());
    }
  }

  std::map<std::size_t, std::size_t> latest_seq;  // draft_no -> seq of its last event
  for (const auto& e : m.events) latest_seq[e.draft_no] = e.seq;
  for (const auto& entry : fs::directory_iterator(dir / "analyses")) {
    std::size_t n = 0;
    if (!parse_draft_file_name(entry.path().filename().string(), ".json.next", n)) continue;
    bool committed = false;
    try {
      const auto staged = io::read_json(entry.path());
      const auto it = latest_seq.find(n);
      committed = it != latest_seq.end() && staged.at("seq").get<std::size_t>() == it->second;
    } catch (const std::exception&) {
      committed = false;  // torn write: it was never committed
    }
    if (committed) {
      io::rename_durable(entry.path(), dir / "analyses" / (std::to_string(n) + ".json"));
    } else {
      fs::remove(entry.path());
    }
  }
  io::fsync_directory(dir / "drafts");
  io::fsync_directory(dir / "analyses");
}

Project Store::create_project(std::string_view source_text,
                              std::optional<std::string> reference_abstract,
                              const engine::ConfigSnapshot& config) {
  if (!text::is_valid_utf8(source_text) ||
      (reference_abstract && !text::is_valid_utf8(*reference_abstract))) {
    throw Error(ErrorCode::kInvalidEncoding, "text is not valid UTF-8");
  }
  if (source_text.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos) {
    throw Error(ErrorCode::kEmptyInput, "source text is empty").with_field("source_text");
  }
  Project p;
  do {
    p.id = random_id();
  } while (fs::exists(project_dir(p.id)));
  p.source_text = std::string(source_text);
  p.reference_abstract = std::move(reference_abstract);
  p.created_at = now();
  p.config = config;

  const fs::path staging = root_ / "projects" / (kStagingPrefix + p.id);
  fs::create_directories(staging / "drafts");
  fs::create_directories(staging / "analyses");
  io::write_file_durable(staging / "project.json", p.to_json().dump(2) + "\n", hook_);
  io::write_file_durable(staging / "history.json", Manifest{}.to_json().dump(2) + "\n", hook_);
  io::fsync_directory(staging / "drafts");
  io::fsync_directory(staging / "analyses");
  io::fsync_directory(staging);
  io::rename_durable(staging, project_dir(p.id), hook_);
  return p;
}

Project Store::project(const std::string& id) const {
  require_project(id);
  std::shared_lock lock(lock_for(id));
  return read_project(id);
}

std::vector<std::string> Store::project_ids() const {
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(root_ / "projects")) {
    const std::string name = entry.path().filename().string();
    if (entry.is_directory() && is_valid_project_id(name) && name.rfind(kStagingPrefix, 0) != 0) {
      ids.push_back(name);
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

DraftRecord Store::add_draft(const std::string& id, std::string_view text) {
  require_project(id);
  if (!text::is_valid_utf8(text)) throw Error(ErrorCode::kInvalidEncoding, "draft is not valid UTF-8");
  if (text.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos) {
    throw Error(ErrorCode::kEmptyInput, "draft text is empty").with_field("text");
  }
  std::unique_lock lock(lock_for(id));
  Manifest m = read_manifest(id);
  DraftRecord r;
  r.project_id = id;
  r.draft_no = m.draft_count + 1;
  r.text = std::string(text);
  io::write_file_atomic(project_dir(id) / "drafts" / (std::to_string(r.draft_no) + ".txt"), text, hook_);
  m.draft_count = r.draft_no;
  write_manifest(id, m);
  return r;
}

DraftRecord Store::draft(const std::string& id, std::size_t draft_no) const {
  require_project(id);
  std::shared_lock lock(lock_for(id));
  const Manifest m = read_manifest(id);
  if (draft_no < 1 || draft_no > m.draft_count) {
    throw Error(ErrorCode::kNotFound, "draft " + std::to_string(draft_no) + " not found")
        .with_field("draft_no");
  }
  DraftRecord r;
  r.project_id = id;
  r.draft_no = draft_no;
  r.text = io::read_file(project_dir(id) / "drafts" / (std::to_string(draft_no) + ".txt"));
  for (auto it = m.events.rbegin(); it != m.events.rend(); ++it) {
    if (it->draft_no != draft_no) continue;
    const auto stored =
        io::read_json(project_dir(id) / "analyses" / (std::to_string(draft_no) + ".json"));
    r.analysis = stored.at("analysis");
    r.analyzed_at = it->analyzed_at;
    break;
  }
  return r;
}

DraftRecord Store::analyze_draft(const std::string& id, std::size_t draft_no,
                                 const engine::Engine& engine) {
  require_project(id);
  std::unique_lock lock(lock_for(id));
  Manifest m = read_manifest(id);
  if (draft_no < 1 || draft_no > m.draft_count) {
    throw Error(ErrorCode::kNotFound, "draft " + std::to_string(draft_no) + " not found")
        .with_field("draft_no");
  }
  const Project p = read_project(id);
  DraftRecord r;
  r.project_id = id;
  r.draft_no = draft_no;
  r.text = io::read_file(project_dir(id) / "drafts" / (std::to_string(draft_no) + ".txt"));

  const auto source = engine.parse_text(p.source_text);
  const auto draft_doc = engine.parse_text(r.text);
  const auto analysis = engine.analyze(draft_doc, &source);
  const nlohmann::json payload = analysis.to_json();

  if (!(engine.snapshot() == p.config)) {
    r.warnings.push_back("configuration differs from the project's snapshot");
  }
  for (const auto& e : m.events) {
    if (e.draft_no == draft_no) {
      r.warnings.push_back("draft was analyzed before; the stored analysis is replaced");
      break;
    }
  }

  HistoryEntry event;
  event.seq = m.events.empty() ? 1 : m.events.back().seq + 1;
  event.draft_no = draft_no;
  for (auto g : analysis.organization.labels) event.organization.emplace_back(genre::genre_name(g));
  event.overall = analysis.report.draft.overall;
  event.analyzed_at = now();

  // Stage, commit the manifest, then promote. Recovery finishes or discards
  // the staged file depending on whether the manifest names its seq.
  const fs::path analyses = project_dir(id) / "analyses";
  const fs::path staged = analyses / (std::to_string(draft_no) + ".json.next");
  const nlohmann::json stored = {{"schema", 1},
                                 {"seq", event.seq},
                                 {"draft_no", draft_no},
                                 {"analyzed_at", event.analyzed_at},
                                 {"warnings", r.warnings},
                                 {"analysis", payload}};
  io::write_file_durable(staged, stored.dump(2) + "\n", hook_);
  io::fsync_directory(analyses);
  m.events.push_back(event);
  write_manifest(id, m);
  io::rename_durable(staged, analyses / (std::to_string(draft_no) + ".json"), hook_);

  r.analysis = payload;
  r.analyzed_at = event.analyzed_at;
  return r;
}

History Store::history(const std::string& id) const {
  require_project(id);
  std::shared_lock lock(lock_for(id));
  return {read_manifest(id).events};
}

}  // namespace coach::session
