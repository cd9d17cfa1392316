#pragma once

// Linguistic features of a draft and their aggregation into five quality
// facets. A feature that cannot be computed (no tokens after filtering, a
// single sentence for pairwise features, a missing lexicon) is Undefined,
// represented as an empty optional, and never throws.

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "coach/discourse.hpp"
#include "coach/similarity.hpp"
#include "coach/text.hpp"

namespace coach::metrics {

using Value = std::optional<double>;

// lemma -> frequency score. Keys are lowercased and lemmatized on load; when
// several surface forms share a lemma the largest score is kept.
class Lexicon {
 public:
  Lexicon() = default;
  Lexicon(std::string name, std::map<std::string, double, std::less<>> entries);

  static Lexicon parse(std::string_view content, std::string name);  // lemma<TAB>score
  static Lexicon load(const std::filesystem::path& path, std::string name);

  const std::string& name() const { return name_; }
  std::size_t size() const { return entries_.size(); }
  std::optional<double> score(std::string_view lemma) const;

 private:
  std::string name_;
  std::map<std::string, double, std::less<>> entries_;
};

enum class ClassFilter { kAll, kContent, kFunction };

// Word-token lemmas (punctuation excluded) passing the filter, in text order.
std::vector<std::string> lemmas(const text::Document& doc, ClassFilter filter);
std::vector<std::string> lemmas(const text::Sentence& s, ClassFilter filter);

// Recall-oriented n-gram overlap with clipped counts:
// |shared n-grams| / |reference n-grams|; 0 when the reference is shorter
// than n.
double rouge_n(const std::vector<std::string>& candidate,
               const std::vector<std::string>& reference, std::size_t n);

Value ttr(const std::vector<std::string>& tokens);

// Mean TTR over every contiguous window; equals ttr() when the text is not
// longer than the window.
Value mattr(const std::vector<std::string>& tokens, std::size_t window);

// Bidirectional MTLD. A factor closes when the running TTR falls strictly
// below `threshold`; the remainder contributes (1 - ttr) / (1 - threshold).
// A direction with zero factors scores the token count.
Value mtld(const std::vector<std::string>& tokens, double threshold = 0.72);

// Mean score over tokens found in the lexicon; Undefined when none are.
Value frequency_feature(const std::vector<std::string>& tokens, const Lexicon& lexicon);

struct FluencyFeatures {
  Value adj_sent_similarity;
  Value repeated_ratio;
  Value adj_function_overlap;
};

FluencyFeatures fluency_features(const text::Document& doc,
                                 const similarity::SimilarityBackend& backend,
                                 bool binary_overlap = false);

struct ConcisenessFeatures {
  double mean_sentence_length = 0.0;
  double mean_clause_length = 0.0;
  double word_count = 0.0;
};

// Lengths are in word tokens. Clauses are delimited by commas, semicolons and
// EDU boundaries (rule segmentation unless a boundary model is given).
ConcisenessFeatures conciseness_features(const text::Document& doc,
                                         const discourse::BoundaryModel* boundary = nullptr);

enum class Feature : std::size_t {
  kFrequencyAll,
  kFrequencyFunction,
  kFrequencyContentSubtlex,
  kFrequencyAllSubtlex,
  kRouge3Source,
  kAdjSentSimilarity,
  kRepeatedLemmaPronounRatio,
  kAdjFunctionOverlap,
  kTtrAll,
  kMattrFunction,
  kContentTokenCount,
  kMtldFunction,
  kMtldAll,
  kMtldContent,
  kLexicalDensity,
  kTtrContent,
  kMeanSentenceLength,
  kMeanClauseLength,
  kWordCount,
  kSdDependentsNsubj,
  kSdDependentsClause,
  kSdDependentsPobj,
};

inline constexpr std::size_t kNumFeatures = 22;

std::string_view feature_name(Feature f);
std::optional<Feature> feature_from_name(std::string_view name);
const std::array<Feature, kNumFeatures>& all_features();

struct FeatureVector {
  std::array<Value, kNumFeatures> values{};

  const Value& operator[](Feature f) const { return values[static_cast<std::size_t>(f)]; }
  Value& operator[](Feature f) { return values[static_cast<std::size_t>(f)]; }

  nlohmann::json to_json() const;
  static FeatureVector from_json(const nlohmann::json& j);
};

// Supplies the dependency-based trio (SD of dependents per nominal subject,
// per clause, per prepositional object). Without one the trio is Undefined.
class ParseProvider {
 public:
  virtual ~ParseProvider() = default;
  virtual std::array<Value, 3> dependent_sds(const text::Document& doc) const = 0;
};

struct FeatureOptions {
  std::size_t mattr_window = 50;
  double mtld_threshold = 0.72;
  bool binary_function_overlap = false;

  static FeatureOptions from_json(const nlohmann::json& j);
};

struct FeatureContext {
  const Lexicon* spoken = nullptr;    // frequency_all / frequency_function
  const Lexicon* subtitle = nullptr;  // the two *_subtlex features
  const text::Document* source = nullptr;
  const similarity::SimilarityBackend* fluency_backend = nullptr;  // bag-of-lemmas if null
  const discourse::BoundaryModel* boundary = nullptr;
  const ParseProvider* parses = nullptr;
  FeatureOptions options;
};

FeatureVector extract_features(const text::Document& draft, const FeatureContext& ctx);

enum class Facet : std::size_t { kUnderstandability, kConsistency, kFluency, kDiversity, kConciseness };
inline constexpr std::size_t kNumFacets = 5;
inline constexpr std::array<Facet, kNumFacets> kAllFacets = {
    Facet::kUnderstandability, Facet::kConsistency, Facet::kFluency, Facet::kDiversity,
    Facet::kConciseness};

std::string_view facet_name(Facet f);
std::optional<Facet> facet_from_name(std::string_view name);

struct Norm {
  double mean = 0.0;
  double sd = 1.0;
};

// Per-facet linear coefficients over z-scored features, plus the
// normalization population. Display score = clamp(4 + scale * s, 1, 7) where
// s is the facet's weighted z-sum.
struct FacetWeights {
  std::string version;
  double scale = 1.0;
  std::array<std::map<Feature, double>, kNumFacets> coefficients;
  std::map<Feature, Norm> norms;

  // Throws kFormatError when a weighted feature lacks a norm or a norm has
  // sd <= 0.
  void validate() const;

  nlohmann::json to_json() const;
  static FacetWeights from_json(const nlohmann::json& j);
  static FacetWeights load(const std::filesystem::path& path);
};

struct FacetScores {
  std::array<Value, kNumFacets> facets{};
  Value overall;
  std::vector<std::string> flags;

  const Value& operator[](Facet f) const { return facets[static_cast<std::size_t>(f)]; }
  nlohmann::json to_json() const;
};

FacetScores facets(const FeatureVector& fv, const FacetWeights& weights);

struct FacetReport {
  FacetScores draft;
  std::vector<FacetScores> per_sentence;
  std::string weights_version;

  nlohmann::json to_json() const;
};

// Draft-level facets plus one bar group per sentence, each computed from the
// sentence alone against the same (draft-level) normalization stats.
FacetReport facet_report(const text::Document& draft, const FeatureVector& draft_features,
                         const FeatureContext& ctx, const FacetWeights& weights);

// Mean and population SD per feature over a set of feature vectors. Features
// that are Undefined everywhere, or constant, are omitted.
std::map<Feature, Norm> fit_norms(const std::vector<FeatureVector>& corpus);

}  // namespace coach::metrics
