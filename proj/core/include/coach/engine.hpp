#pragma once

// Loads every model and table named by a config file and runs the analysis
// pipeline. The CLI and the HTTP service both serialize through this class,
// so their payloads are identical.

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "coach/align.hpp"
#include "coach/discourse.hpp"
#include "coach/draftgen.hpp"
#include "coach/genre.hpp"
#include "coach/guidance.hpp"
#include "coach/metrics.hpp"
#include "coach/similarity.hpp"
#include "coach/text.hpp"

namespace coach::engine {

// Paths are resolved against the directory holding the config file.
struct Config {
  std::filesystem::path function_words;
  std::filesystem::path abbreviations;
  std::optional<std::filesystem::path> relations;
  std::optional<std::filesystem::path> spoken_lexicon;
  std::optional<std::filesystem::path> subtitle_lexicon;
  std::optional<std::filesystem::path> weights;
  std::optional<std::filesystem::path> genre_model;
  std::optional<std::filesystem::path> boundary_model;
  std::optional<std::filesystem::path> relation_model;
  std::optional<std::filesystem::path> guidance;
  std::optional<std::filesystem::path> strategies;
  std::optional<std::filesystem::path> gold_edus;
  std::optional<std::filesystem::path> gold_trees;
  std::set<genre::GenreLabel> required_genres;
  std::size_t k = 3;
  draftgen::DraftParams draft;
  metrics::FeatureOptions features;
  nlohmann::json embedding_service;    // null when disabled
  nlohmann::json abstractive_service;  // null when disabled

  static Config from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  static Config load(const std::filesystem::path& path);
};

// The part of the configuration a project records at creation time.
struct ConfigSnapshot {
  std::string weights_version;
  std::vector<std::string> lexicons;
  std::size_t k = 0;

  bool operator==(const ConfigSnapshot& o) const {
    return weights_version == o.weights_version && lexicons == o.lexicons && k == o.k;
  }
  nlohmann::json to_json() const;
  static ConfigSnapshot from_json(const nlohmann::json& j);
};

struct Analysis {
  genre::OrganizationScheme organization;
  std::set<genre::GenreLabel> required;
  std::set<genre::GenreLabel> missing;
  metrics::FeatureVector features;
  metrics::FacetReport report;
  std::vector<guidance::Tip> guidance;
  std::vector<std::string> sentences;
  std::vector<std::string> warnings;

  // {schema, organization, facets, per_sentence, guidance, features, meta}
  nlohmann::json to_json() const;
};

struct RstRequest {
  std::string scope = "full";             // "full" or "paragraph_<i>"
  std::string granularity = "sentence";   // "sentence" or "edu"
  std::string parser = "heuristic";       // "heuristic", "model" or "gold"
};

class Engine {
 public:
  explicit Engine(Config config);
  static Engine load(const std::filesystem::path& config_path);

  const Config& config() const { return config_; }
  const text::WordList& function_words() const { return function_words_; }
  const text::WordList& abbreviations() const { return abbreviations_; }
  const discourse::RelationInventory& relations() const { return relations_; }
  ConfigSnapshot snapshot() const;
  const std::optional<metrics::FacetWeights>& weights() const { return weights_; }

  // Throws kEmptyInput / kInvalidEncoding.
  text::Document parse_text(std::string_view raw) const;

  // Throws kAnalysisUnavailable naming the missing model or table.
  Analysis analyze(const text::Document& draft, const text::Document* source) const;

  genre::OrganizationScheme organization(const text::Document& doc) const;

  nlohmann::json rst(const text::Document& source, const RstRequest& request) const;

  align::AlignmentMap align(const text::Document& abstract, const text::Document& source,
                            std::size_t k) const;

  draftgen::DraftPrompt prompt(const text::Document& source,
                               std::optional<std::size_t> target_count) const;

  // Throws kAnalysisUnavailable when no strategies file is configured.
  const std::string& strategies() const;

  // Replaces the TF-IDF backend used for alignment (e.g. an embedding client).
  void set_alignment_backend(std::shared_ptr<const similarity::SimilarityBackend> backend) {
    alignment_backend_ = std::move(backend);
  }

  metrics::FeatureContext feature_context(const text::Document* source) const;

 private:
  struct GoldEntry {
    std::string normalized_text;
    std::vector<std::string> edus;
    std::string bracketed;
  };

  const GoldEntry* find_gold(const text::Document& source) const;
  [[noreturn]] void unavailable(const std::string& what) const;

  Config config_;
  text::WordList function_words_;
  text::WordList abbreviations_;
  discourse::RelationInventory relations_;
  std::optional<metrics::Lexicon> spoken_;
  std::optional<metrics::Lexicon> subtitle_;
  std::optional<metrics::FacetWeights> weights_;
  std::optional<genre::GenreModel> genre_model_;
  std::optional<discourse::BoundaryModel> boundary_;
  std::optional<discourse::RelationModel> relation_model_;
  guidance::GuidanceRules guidance_;
  std::optional<std::string> strategies_;
  std::vector<GoldEntry> gold_;
  std::vector<std::string> load_problems_;
  std::shared_ptr<const similarity::SimilarityBackend> alignment_backend_;
};

// Collapses runs of whitespace to one space and trims the ends.
std::string normalize_space(std::string_view s);

}  // namespace coach::engine
