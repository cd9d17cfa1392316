#pragma once

// Five-way rhetorical genre classification of abstract sentences with a
// position-aware multinomial naive Bayes model.

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "coach/text.hpp"

namespace coach::genre {

// Canonical order doubles as the tie-break order.
enum class GenreLabel { kBackground = 0, kObjective, kMethod, kResult, kConclusion };

inline constexpr std::size_t kNumGenres = 5;
inline constexpr std::size_t kNumPositionBuckets = 5;
inline constexpr std::array<GenreLabel, kNumGenres> kAllGenres = {
    GenreLabel::kBackground, GenreLabel::kObjective, GenreLabel::kMethod, GenreLabel::kResult,
    GenreLabel::kConclusion};

std::string_view genre_name(GenreLabel g);
std::optional<GenreLabel> genre_from_name(std::string_view name);

// Position of sentence `ordinal` (0-based) among `count`, in [0, 5).
std::size_t position_bucket(std::size_t ordinal, std::size_t count);

// Unigram and adjacent-bigram features over word lemmas.
std::vector<std::string> ngram_features(const text::Sentence& s);

// Foreign label -> GenreLabel, case-insensitive. Seeded with the PubMed RCT
// names (BACKGROUND, OBJECTIVE, METHODS, RESULTS, CONCLUSIONS).
class LabelMapping {
 public:
  LabelMapping();
  static LabelMapping load(const std::filesystem::path& path);  // foreign<TAB>label lines

  void add(std::string_view foreign, GenreLabel label);
  std::optional<GenreLabel> map(std::string_view foreign) const;

 private:
  std::map<std::string, GenreLabel, std::less<>> table_;
};

struct LabeledSentence {
  std::string doc_id;
  GenreLabel label = GenreLabel::kBackground;
  std::string text;
  std::size_t ordinal = 0;  // within its abstract
  std::size_t count = 0;    // sentences in its abstract
};

// RCT format: `###<doc_id>` header, `LABEL<TAB>sentence` lines, blank line
// between records. Unknown labels raise kFormatError with the line number.
std::vector<LabeledSentence> read_rct(std::istream& in, const LabelMapping& mapping);
std::vector<LabeledSentence> read_rct(const std::filesystem::path& path,
                                      const LabelMapping& mapping);

class GenreModel {
 public:
  GenreModel() = default;

  double alpha() const { return alpha_; }
  std::size_t vocabulary_size() const { return vocabulary_.size(); }
  const std::array<std::size_t, kNumGenres>& class_counts() const { return class_counts_; }

  // log P(c) + sum_f log P(f|c) + log P(bucket|c), one entry per genre.
  std::array<double, kNumGenres> class_scores(const text::Sentence& s, std::size_t ordinal,
                                              std::size_t count) const;
  GenreLabel predict(const text::Sentence& s, std::size_t ordinal, std::size_t count) const;

  nlohmann::json to_json() const;
  static GenreModel from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static GenreModel load(const std::filesystem::path& path);

 private:
  friend GenreModel train(const std::vector<LabeledSentence>&, double, const text::WordList&);
  void finalize();

  double alpha_ = 1.0;
  std::array<std::size_t, kNumGenres> class_counts_{};
  std::array<std::size_t, kNumGenres> feature_totals_{};
  std::array<std::array<std::size_t, kNumPositionBuckets>, kNumGenres> bucket_counts_{};
  std::map<std::string, std::array<std::size_t, kNumGenres>, std::less<>> vocabulary_;

  std::array<double, kNumGenres> log_prior_{};
  std::array<double, kNumGenres> log_unseen_{};
  std::array<std::array<double, kNumPositionBuckets>, kNumGenres> log_bucket_{};
};

// Throws kDegenerateCorpus unless at least two genres have examples.
GenreModel train(const std::vector<LabeledSentence>& corpus, double alpha,
                 const text::WordList& function_words);

struct OrganizationScheme {
  std::vector<GenreLabel> labels;
};

OrganizationScheme classify(const GenreModel& model, const std::vector<text::Sentence>& draft);

std::set<GenreLabel> completeness(const OrganizationScheme& scheme,
                                  const std::set<GenreLabel>& required);

nlohmann::json to_json(const OrganizationScheme& scheme);

}  // namespace coach::genre
