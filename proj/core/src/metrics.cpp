#include "coach/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "coach/error.hpp"
#include "coach/io.hpp"

namespace coach::metrics {
namespace {

const std::set<std::string, std::less<>> kThirdPersonPronouns = {
    "he",   "him",    "his",     "himself", "she",  "her",    "hers",       "herself",
    "it",   "its",    "itself",  "they",    "them", "their",  "theirs",     "themselves"};

constexpr std::array<std::string_view, kNumFeatures> kFeatureNames = {
    "frequency_all",
    "frequency_function",
    "frequency_content_subtlex",
    "frequency_all_subtlex",
    "rouge3_source",
    "adj_sent_similarity",
    "repeated_lemma_pronoun_ratio",
    "adj_function_overlap",
    "ttr_all",
    "mattr_function",
    "content_token_count",
    "mtld_function",
    "mtld_all",
    "mtld_content",
    "lexical_density",
    "ttr_content",
    "mean_sentence_length",
    "mean_clause_length",
    "word_count",
    "sd_dependents_nsubj",
    "sd_dependents_clause",
    "sd_dependents_pobj",
};

constexpr std::array<std::string_view, kNumFacets> kFacetNames = {
    "understandability", "consistency", "fluency", "diversity", "conciseness"};

bool passes(const text::Token& t, ClassFilter filter) {
  if (!t.is_word()) return false;
  switch (filter) {
    case ClassFilter::kAll: return true;
    case ClassFilter::kContent: return !t.is_function();
    case ClassFilter::kFunction: return t.is_function();
  }
  return false;
}

double mtld_one_direction(const std::vector<std::string>& tokens, double threshold) {
  double factors = 0.0;
  std::unordered_set<std::string> types;
  std::size_t count = 0;
  for (const auto& t : tokens) {
    ++count;
    types.insert(t);
    const double ratio = static_cast<double>(types.size()) / static_cast<double>(count);
    if (ratio < threshold) {
      factors += 1.0;
      types.clear();
      count = 0;
    }
  }
  if (count > 0) {
    const double ratio = static_cast<double>(types.size()) / static_cast<double>(count);
    factors += (1.0 - ratio) / (1.0 - threshold);
  }
  const double n = static_cast<double>(tokens.size());
  return factors == 0.0 ? n : n / factors;
}

Value mean_or_undefined(double sum, std::size_t n) {
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

text::Document single_sentence_document(const text::Document& doc, std::size_t i) {
  text::Document sub;
  sub.raw = doc.raw;
  sub.sentences.push_back(doc.sentences[i]);
  sub.sentences.back().index = 0;
  sub.paragraphs.push_back({0, 1});
  return sub;
}

}  // namespace

// --- lexicon --------------------------------------------------------------------------

Lexicon::Lexicon(std::string name, std::map<std::string, double, std::less<>> entries)
    : name_(std::move(name)) {
  for (auto& [k, v] : entries) {
    auto [it, inserted] = entries_.emplace(text::lemmatize(k), v);
    if (!inserted) it->second = std::max(it->second, v);
  }
}

Lexicon Lexicon::parse(std::string_view content, std::string name) {
  std::map<std::string, double, std::less<>> entries;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < content.size()) {
    std::size_t eol = content.find('\n', pos);
    if (eol == std::string_view::npos) eol = content.size();
    std::string_view line = content.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw Error(ErrorCode::kFormatError, "expected lemma<TAB>score", line_no);
    }
    double score = 0.0;
    try {
      std::size_t used = 0;
      const std::string field(line.substr(tab + 1));
      score = std::stod(field, &used);
      if (used != field.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorCode::kFormatError, "score is not a number", line_no);
    }
    if (!std::isfinite(score) || score < 0.0) {
      throw Error(ErrorCode::kFormatError, "score must be finite and non-negative", line_no);
    }
    const std::string key = text::to_lower_ascii(line.substr(0, tab));
    auto [it, inserted] = entries.emplace(key, score);
    if (!inserted) it->second = std::max(it->second, score);
  }
  return Lexicon(std::move(name), std::move(entries));
}

Lexicon Lexicon::load(const std::filesystem::path& path, std::string name) {
  return parse(io::read_file(path), std::move(name));
}

std::optional<double> Lexicon::score(std::string_view lemma) const {
  if (auto it = entries_.find(text::to_lower_ascii(lemma)); it != entries_.end()) return it->second;
  return std::nullopt;
}

// --- token features ---------------------------------------------------------------------

std::vector<std::string> lemmas(const text::Sentence& s, ClassFilter filter) {
  std::vector<std::string> out;
  for (const auto& t : s.tokens) {
    if (passes(t, filter)) out.push_back(t.lemma);
  }
  return out;
}

std::vector<std::string> lemmas(const text::Document& doc, ClassFilter filter) {
  std::vector<std::string> out;
  for (const auto& s : doc.sentences) {
    for (const auto& t : s.tokens) {
      if (passes(t, filter)) out.push_back(t.lemma);
    }
  }
  return out;
}

double rouge_n(const std::vector<std::string>& candidate,
               const std::vector<std::string>& reference, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "rouge n must be >= 1");
  if (reference.size() < n) return 0.0;
  auto grams = [n](const std::vector<std::string>& toks) {
    std::map<std::string, std::size_t> counts;
    for (std::size_t i = 0; i + n <= toks.size(); ++i) {
      std::string key = toks[i];
      for (std::size_t k = 1; k < n; ++k) {
        key += '\x1f';
        key += toks[i + k];
      }
      ++counts[key];
    }
    return counts;
  };
  const auto ref = grams(reference);
  const auto cand = grams(candidate);
  std::size_t shared = 0;
  for (const auto& [g, c] : ref) {
    if (auto it = cand.find(g); it != cand.end()) shared += std::min(c, it->second);
  }
  return static_cast<double>(shared) / static_cast<double>(reference.size() - n + 1);
}

Value ttr(const std::vector<std::string>& tokens) {
  if (tokens.empty()) return std::nullopt;
  const std::set<std::string> types(tokens.begin(), tokens.end());
  return static_cast<double>(types.size()) / static_cast<double>(tokens.size());
}

Value mattr(const std::vector<std::string>& tokens, std::size_t window) {
  if (window == 0) throw Error(ErrorCode::kInvalidArgument, "MATTR window must be >= 1");
  if (tokens.size() <= window) return ttr(tokens);
  std::unordered_map<std::string, std::size_t> counts;
  for (std::size_t i = 0; i < window; ++i) ++counts[tokens[i]];
  double sum = static_cast<double>(counts.size()) / static_cast<double>(window);
  const std::size_t windows = tokens.size() - window + 1;
  for (std::size_t i = window; i < tokens.size(); ++i) {
    ++counts[tokens[i]];
    auto out = counts.find(tokens[i - window]);
    if (--out->second == 0) counts.erase(out);
    sum += static_cast<double>(counts.size()) / static_cast<double>(window);
  }
  return sum / static_cast<double>(windows);
}

Value mtld(const std::vector<std::string>& tokens, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "MTLD threshold must be in (0, 1)");
  }
  if (tokens.empty()) return std::nullopt;
  const std::vector<std::string> reversed(tokens.rbegin(), tokens.rend());
  return (mtld_one_direction(tokens, threshold) + mtld_one_direction(reversed, threshold)) / 2.0;
}

Value frequency_feature(const std::vector<std::string>& tokens, const Lexicon& lexicon) {
  double sum = 0.0;
  std::size_t scored = 0;
  for (const auto& t : tokens) {
    if (auto s = lexicon.score(t)) {
      sum += *s;
      ++scored;
    }
  }
  return mean_or_undefined(sum, scored);
}

FluencyFeatures fluency_features(const text::Document& doc,
                                 const similarity::SimilarityBackend& backend,
                                 bool binary_overlap) {
  FluencyFeatures f;
  std::map<std::string, std::size_t> content_counts;
  std::size_t pronouns = 0;
  std::size_t tokens = 0;
  for (const auto& s : doc.sentences) {
    tokens += s.tokens.size();
    for (const auto& t : s.tokens) {
      if (!t.is_word()) continue;
      if (kThirdPersonPronouns.count(t.lemma)) ++pronouns;
      if (t.is_content_word()) ++content_counts[t.lemma];
    }
  }
  std::size_t repeats = 0;
  for (const auto& [lemma, c] : content_counts) repeats += c - 1;
  if (tokens > 0) {
    f.repeated_ratio = static_cast<double>(repeats + pronouns) / static_cast<double>(tokens);
  }

  if (doc.sentences.size() < 2) return f;
  double sim_sum = 0.0;
  double overlap_sum = 0.0;
  const std::size_t pairs = doc.sentences.size() - 1;
  for (std::size_t i = 0; i < pairs; ++i) {
    const auto& a = doc.sentences[i];
    const auto& b = doc.sentences[i + 1];
    sim_sum += backend.similarity({a}, {b}).sim.at(0).at(0);
    const auto fa = lemmas(a, ClassFilter::kFunction);
    const auto fb = lemmas(b, ClassFilter::kFunction);
    const std::set<std::string> sa(fa.begin(), fa.end());
    std::set<std::string> shared;
    for (const auto& w : fb) {
      if (sa.count(w)) shared.insert(w);
    }
    overlap_sum += binary_overlap ? (shared.empty() ? 0.0 : 1.0) : static_cast<double>(shared.size());
  }
  f.adj_sent_similarity = sim_sum / static_cast<double>(pairs);
  f.adj_function_overlap = overlap_sum / static_cast<double>(pairs);
  return f;
}

ConcisenessFeatures conciseness_features(const text::Document& doc,
                                         const discourse::BoundaryModel* boundary) {
  ConcisenessFeatures c;
  std::size_t words = 0;
  std::size_t clauses = 0;
  for (const auto& s : doc.sentences) {
    const auto edus = boundary ? discourse::segment_edus(s, *boundary) : discourse::segment_edus(s);
    std::set<std::size_t> edu_starts;
    for (const auto& e : edus) edu_starts.insert(e.token_begin);
    std::size_t in_clause = 0;
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      const auto& t = s.tokens[i];
      const bool delimiter = t.punct && (t.surface == "," || t.surface == ";");
      if (delimiter || (edu_starts.count(i) && i > 0)) {
        if (in_clause > 0) ++clauses;
        in_clause = 0;
      }
      if (t.is_word()) {
        ++in_clause;
        ++words;
      }
    }
    if (in_clause > 0) ++clauses;
  }
  c.word_count = static_cast<double>(words);
  if (!doc.sentences.empty()) {
    c.mean_sentence_length = static_cast<double>(words) / static_cast<double>(doc.sentences.size());
  }
  if (clauses > 0) c.mean_clause_length = static_cast<double>(words) / static_cast<double>(clauses);
  return c;
}

// --- feature vector --------------------------------------------------------------------------

std::string_view feature_name(Feature f) { return kFeatureNames[static_cast<std::size_t>(f)]; }

std::optional<Feature> feature_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    if (kFeatureNames[i] == name) return static_cast<Feature>(i);
  }
  return std::nullopt;
}

const std::array<Feature, kNumFeatures>& all_features() {
  static const auto features = [] {
    std::array<Feature, kNumFeatures> a{};
    for (std::size_t i = 0; i < kNumFeatures; ++i) a[i] = static_cast<Feature>(i);
    return a;
  }();
  return features;
}

nlohmann::json FeatureVector::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (auto f : all_features()) {
    const auto& v = (*this)[f];
    j[std::string(feature_name(f))] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  }
  return j;
}

FeatureVector FeatureVector::from_json(const nlohmann::json& j) {
  FeatureVector fv;
  for (const auto& [name, v] : j.items()) {
    const auto f = feature_from_name(name);
    if (!f) throw Error(ErrorCode::kFormatError, "unknown feature '" + name + "'");
    if (!v.is_null()) fv[*f] = v.get<double>();
  }
  return fv;
}

FeatureOptions FeatureOptions::from_json(const nlohmann::json& j) {
  FeatureOptions o;
  o.mattr_window = j.value("mattr_window", o.mattr_window);
  o.mtld_threshold = j.value("mtld_threshold", o.mtld_threshold);
  o.binary_function_overlap = j.value("binary_function_overlap", o.binary_function_overlap);
  return o;
}

FeatureVector extract_features(const text::Document& draft, const FeatureContext& ctx) {
  FeatureVector fv;
  const auto all = lemmas(draft, ClassFilter::kAll);
  const auto content = lemmas(draft, ClassFilter::kContent);
  const auto function = lemmas(draft, ClassFilter::kFunction);

  if (ctx.spoken) {
    fv[Feature::kFrequencyAll] = frequency_feature(all, *ctx.spoken);
    fv[Feature::kFrequencyFunction] = frequency_feature(function, *ctx.spoken);
  }
  if (ctx.subtitle) {
    fv[Feature::kFrequencyContentSubtlex] = frequency_feature(content, *ctx.subtitle);
    fv[Feature::kFrequencyAllSubtlex] = frequency_feature(all, *ctx.subtitle);
  }
  if (ctx.source) {
    fv[Feature::kRouge3Source] = rouge_n(all, lemmas(*ctx.source, ClassFilter::kAll), 3);
  }

  const similarity::BagOfLemmasBackend bag;
  const auto flu = fluency_features(
      draft, ctx.fluency_backend ? *ctx.fluency_backend : bag, ctx.options.binary_function_overlap);
  fv[Feature::kAdjSentSimilarity] = flu.adj_sent_similarity;
  fv[Feature::kRepeatedLemmaPronounRatio] = flu.repeated_ratio;
  fv[Feature::kAdjFunctionOverlap] = flu.adj_function_overlap;

  fv[Feature::kTtrAll] = ttr(all);
  fv[Feature::kMattrFunction] = mattr(function, ctx.options.mattr_window);
  fv[Feature::kContentTokenCount] = static_cast<double>(content.size());
  fv[Feature::kMtldFunction] = mtld(function, ctx.options.mtld_threshold);
  fv[Feature::kMtldAll] = mtld(all, ctx.options.mtld_threshold);
  fv[Feature::kMtldContent] = mtld(content, ctx.options.mtld_threshold);
  if (!all.empty()) {
    fv[Feature::kLexicalDensity] =
        static_cast<double>(content.size()) / static_cast<double>(all.size());
  }
  fv[Feature::kTtrContent] = ttr(content);

  const auto con = conciseness_features(draft, ctx.boundary);
  fv[Feature::kMeanSentenceLength] = con.mean_sentence_length;
  fv[Feature::kMeanClauseLength] = con.mean_clause_length;
  fv[Feature::kWordCount] = con.word_count;

  if (ctx.parses) {
    const auto sds = ctx.parses->dependent_sds(draft);
    fv[Feature::kSdDependentsNsubj] = sds[0];
    fv[Feature::kSdDependentsClause] = sds[1];
    fv[Feature::kSdDependentsPobj] = sds[2];
  }
  return fv;
}

// --- facets -----------------------------------------------------------------------------------

std::string_view facet_name(Facet f) { return kFacetNames[static_cast<std::size_t>(f)]; }

std::optional<Facet> facet_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNumFacets; ++i) {
    if (kFacetNames[i] == name) return static_cast<Facet>(i);
  }
  return std::nullopt;
}

void FacetWeights::validate() const {
  for (auto facet : kAllFacets) {
    for (const auto& [feature, w] : coefficients[static_cast<std::size_t>(facet)]) {
      if (!std::isfinite(w)) {
        throw Error(ErrorCode::kFormatError, "non-finite coefficient for " +
                                                 std::string(feature_name(feature)));
      }
      const auto it = norms.find(feature);
      if (it == norms.end()) {
        throw Error(ErrorCode::kFormatError,
                    "no normalization stats for weighted feature " + std::string(feature_name(feature)));
      }
    }
  }
  for (const auto& [feature, norm] : norms) {
    if (!(norm.sd > 0.0) || !std::isfinite(norm.mean) || !std::isfinite(norm.sd)) {
      throw Error(ErrorCode::kFormatError,
                  "normalization sd must be positive for " + std::string(feature_name(feature)));
    }
  }
}

nlohmann::json FacetWeights::to_json() const {
  nlohmann::json j;
  j["schema"] = 1;
  j["version"] = version;
  j["scale"] = scale;
  nlohmann::json fj = nlohmann::json::object();
  for (auto facet : kAllFacets) {
    nlohmann::json cj = nlohmann::json::object();
    for (const auto& [feature, w] : coefficients[static_cast<std::size_t>(facet)]) {
      cj[std::string(feature_name(feature))] = w;
    }
    fj[std::string(facet_name(facet))] = std::move(cj);
  }
  j["facets"] = std::move(fj);
  nlohmann::json nj = nlohmann::json::object();
  for (const auto& [feature, n] : norms) {
    nj[std::string(feature_name(feature))] = {{"mean", n.mean}, {"sd", n.sd}};
  }
  j["norms"] = std::move(nj);
  return j;
}

FacetWeights FacetWeights::from_json(const nlohmann::json& j) {
  if (j.value("schema", 0) != 1) throw Error(ErrorCode::kFormatError, "facet weights need schema 1");
  FacetWeights w;
  try {
    w.version = j.at("version").get<std::string>();
    w.scale = j.value("scale", 1.0);
    for (const auto& [facet_str, coeffs] : j.at("facets").items()) {
      const auto facet = facet_from_name(facet_str);
      if (!facet) throw Error(ErrorCode::kFormatError, "unknown facet '" + facet_str + "'");
      for (const auto& [feature_str, c] : coeffs.items()) {
        const auto feature = feature_from_name(feature_str);
        if (!feature) throw Error(ErrorCode::kFormatError, "unknown feature '" + feature_str + "'");
        w.coefficients[static_cast<std::size_t>(*facet)][*feature] = c.get<double>();
      }
    }
    for (const auto& [feature_str, n] : j.at("norms").items()) {
      const auto feature = feature_from_name(feature_str);
      if (!feature) throw Error(ErrorCode::kFormatError, "unknown feature '" + feature_str + "'");
      w.norms[*feature] = {n.at("mean").get<double>(), n.at("sd").get<double>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("bad facet weights: ") + e.what());
  }
  w.validate();
  return w;
}

FacetWeights FacetWeights::load(const std::filesystem::path& path) {
  return from_json(io::read_json(path));
}

nlohmann::json FacetScores::to_json() const {
  nlohmann::json j;
  nlohmann::json fj = nlohmann::json::object();
  for (auto f : kAllFacets) {
    const auto& v = (*this)[f];
    fj[std::string(facet_name(f))] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  }
  j["facets"] = std::move(fj);
  j["overall"] = overall ? nlohmann::json(*overall) : nlohmann::json(nullptr);
  j["flags"] = flags;
  return j;
}

FacetScores facets(const FeatureVector& fv, const FacetWeights& weights) {
  FacetScores out;
  double overall_sum = 0.0;
  std::size_t defined = 0;
  for (auto facet : kAllFacets) {
    const auto& coeffs = weights.coefficients[static_cast<std::size_t>(facet)];
    double weighted = 0.0;
    double mass = 0.0;
    // Map order makes the sum independent of how features were listed.
    for (const auto& [feature, w] : coeffs) {
      const auto& x = fv[feature];
      if (!x) continue;
      const Norm& n = weights.norms.at(feature);
      weighted += w * ((*x - n.mean) / n.sd);
      mass += std::abs(w);
    }
    if (mass == 0.0) {
      out.flags.push_back(std::string(facet_name(facet)) + ": undefined");
      continue;
    }
    const double score = std::clamp(4.0 + weights.scale * (weighted / mass), 1.0, 7.0);
    out.facets[static_cast<std::size_t>(facet)] = score;
    overall_sum += score;
    ++defined;
  }
  out.overall = mean_or_undefined(overall_sum, defined);
  return out;
}

nlohmann::json FacetReport::to_json() const {
  nlohmann::json j = draft.to_json();
  nlohmann::json ps = nlohmann::json::array();
  for (const auto& s : per_sentence) ps.push_back(s.to_json());
  j["per_sentence"] = std::move(ps);
  j["weights_version"] = weights_version;
  return j;
}

FacetReport facet_report(const text::Document& draft, const FeatureVector& draft_features,
                         const FeatureContext& ctx, const FacetWeights& weights) {
  FacetReport r;
  r.weights_version = weights.version;
  r.draft = facets(draft_features, weights);
  for (std::size_t i = 0; i < draft.sentences.size(); ++i) {
    const auto sub = single_sentence_document(draft, i);
    r.per_sentence.push_back(facets(extract_features(sub, ctx), weights));
  }
  return r;
}

std::map<Feature, Norm> fit_norms(const std::vector<FeatureVector>& corpus) {
  std::map<Feature, Norm> out;
  for (auto f : all_features()) {
    std::vector<double> xs;
    for (const auto& fv : corpus) {
      if (fv[f]) xs.push_back(*fv[f]);
    }
    if (xs.size() < 2) continue;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size());
    if (var <= 0.0) continue;
    out[f] = {mean, std::sqrt(var)};
  }
  return out;
}

}  // namespace coach::metrics
