#include "coach/engine.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "coach/error.hpp"
#include "coach/io.hpp"

namespace coach::engine {
namespace {

std::optional<std::filesystem::path> optional_path(const nlohmann::json& j, const char* key,
                                                   const std::filesystem::path& base) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return base / j.at(key).get<std::string>();
}

nlohmann::json value_or_null(const metrics::Value& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json facet_object(const metrics::FacetScores& s) {
  nlohmann::json j = nlohmann::json::object();
  for (auto f : metrics::kAllFacets) j[std::string(metrics::facet_name(f))] = value_or_null(s[f]);
  j["overall"] = value_or_null(s.overall);
  j["flags"] = s.flags;
  return j;
}

nlohmann::json genre_list(const std::set<genre::GenreLabel>& labels) {
  nlohmann::json j = nlohmann::json::array();
  for (auto g : labels) j.push_back(genre::genre_name(g));
  return j;
}

std::map<std::string, std::string> read_gold_trees(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw Error(ErrorCode::kFormatError, "expected doc_id<TAB>tree", line_no);
    out[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return out;
}

std::vector<discourse::Edu> renumber(std::vector<discourse::Edu> units) {
  for (std::size_t i = 0; i < units.size(); ++i) units[i].id = i;
  return units;
}

}  // namespace

std::string normalize_space(std::string_view s) {
  std::string out;
  bool pending = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending = !out.empty();
      continue;
    }
    if (pending) out += ' ';
    pending = false;
    out += c;
  }
  return out;
}

// --- config ----------------------------------------------------------------------------

Config Config::from_json(const nlohmann::json& j, const std::filesystem::path& base) {
  if (j.value("schema", 0) != 1) throw Error(ErrorCode::kFormatError, "config needs schema 1");
  Config c;
  try {
    c.function_words = base / j.at("function_words").get<std::string>();
    c.abbreviations = base / j.at("abbreviations").get<std::string>();
    c.relations = optional_path(j, "relations", base);
    if (j.contains("lexicons")) {
      c.spoken_lexicon = optional_path(j.at("lexicons"), "spoken", base);
      c.subtitle_lexicon = optional_path(j.at("lexicons"), "subtitle", base);
    }
    c.weights = optional_path(j, "weights", base);
    c.genre_model = optional_path(j, "genre_model", base);
    c.boundary_model = optional_path(j, "boundary_model", base);
    c.relation_model = optional_path(j, "relation_model", base);
    c.guidance = optional_path(j, "guidance", base);
    c.strategies = optional_path(j, "strategies", base);
    if (j.contains("gold")) {
      c.gold_edus = optional_path(j.at("gold"), "edus", base);
      c.gold_trees = optional_path(j.at("gold"), "trees", base);
    }
    if (j.contains("required_genres")) {
      for (const auto& g : j.at("required_genres")) {
        const auto label = genre::genre_from_name(g.get<std::string>());
        if (!label) throw Error(ErrorCode::kFormatError, "unknown genre '" + g.get<std::string>() + "'");
        c.required_genres.insert(*label);
      }
    } else {
      c.required_genres.insert(genre::kAllGenres.begin(), genre::kAllGenres.end());
    }
    c.k = j.value("k", c.k);
    if (j.contains("draftgen")) c.draft = draftgen::DraftParams::from_json(j.at("draftgen"));
    if (j.contains("features")) c.features = metrics::FeatureOptions::from_json(j.at("features"));
    c.embedding_service = j.value("embedding_service", nlohmann::json(nullptr));
    c.abstractive_service = j.value("abstractive_service", nlohmann::json(nullptr));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("bad config: ") + e.what());
  }
  if (c.k == 0) throw Error(ErrorCode::kFormatError, "config k must be at least 1");
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  return from_json(io::read_json(path), path.parent_path());
}

nlohmann::json ConfigSnapshot::to_json() const {
  return {{"weights_version", weights_version}, {"lexicons", lexicons}, {"k", k}};
}

ConfigSnapshot ConfigSnapshot::from_json(const nlohmann::json& j) {
  ConfigSnapshot s;
  s.weights_version = j.value("weights_version", "");
  s.lexicons = j.value("lexicons", std::vector<std::string>{});
  s.k = j.value("k", std::size_t{0});
  return s;
}

// --- analysis payload -------------------------------------------------------------------

nlohmann::json Analysis::to_json() const {
  nlohmann::json labels = nlohmann::json::array();
  for (auto g : organization.labels) labels.push_back(genre::genre_name(g));

  nlohmann::json per_sentence = nlohmann::json::array();
  for (std::size_t i = 0; i < report.per_sentence.size(); ++i) {
    per_sentence.push_back({{"index", i},
                            {"text", i < sentences.size() ? sentences[i] : std::string()},
                            {"genre", i < organization.labels.size()
                                          ? nlohmann::json(genre::genre_name(organization.labels[i]))
                                          : nlohmann::json(nullptr)},
                            {"facets", facet_object(report.per_sentence[i])}});
  }
  return {{"schema", 1},
          {"organization", {{"labels", std::move(labels)},
                            {"required", genre_list(required)},
                            {"missing", genre_list(missing)}}},
          {"facets", facet_object(report.draft)},
          {"per_sentence", std::move(per_sentence)},
          {"guidance", guidance::to_json(guidance)},
          {"features", features.to_json()},
          {"meta", {{"weights_version", report.weights_version}, {"warnings", warnings}}}};
}

// --- engine ---------------------------------------------------------------------------------

Engine::Engine(Config config) : config_(std::move(config)) {
  function_words_ = text::WordList::load(config_.function_words);
  abbreviations_ = text::WordList::load(config_.abbreviations);
  relations_ = config_.relations ? discourse::RelationInventory::load(*config_.relations)
                                 : discourse::RelationInventory::standard();

  // A configured file that does not exist makes the dependent operation
  // unavailable; a file that exists but is malformed is a load error.
  auto present = [this](const std::optional<std::filesystem::path>& p, const std::string& what) {
    if (!p) return false;
    if (!std::filesystem::exists(*p)) {
      load_problems_.push_back(what + " '" + p->string() + "' is missing");
      return false;
    }
    return true;
  };
  if (present(config_.spoken_lexicon, "spoken lexicon")) {
    spoken_ = metrics::Lexicon::load(*config_.spoken_lexicon, config_.spoken_lexicon->stem().string());
  }
  if (present(config_.subtitle_lexicon, "subtitle lexicon")) {
    subtitle_ =
        metrics::Lexicon::load(*config_.subtitle_lexicon, config_.subtitle_lexicon->stem().string());
  }
  if (present(config_.weights, "facet weights")) weights_ = metrics::FacetWeights::load(*config_.weights);
  if (present(config_.genre_model, "genre model")) {
    genre_model_ = genre::GenreModel::load(*config_.genre_model);
  }
  if (present(config_.boundary_model, "boundary model")) {
    boundary_ = discourse::BoundaryModel::load(*config_.boundary_model);
  }
  if (present(config_.relation_model, "relation model")) {
    relation_model_ = discourse::RelationModel::from_json(io::read_json(*config_.relation_model));
  }
  if (present(config_.guidance, "guidance rules")) {
    guidance_ = guidance::GuidanceRules::load(*config_.guidance);
  }
  if (present(config_.strategies, "strategies text")) strategies_ = io::read_file(*config_.strategies);
  if (config_.gold_edus && config_.gold_trees && present(config_.gold_edus, "gold EDU file") &&
      present(config_.gold_trees, "gold tree file")) {
    const auto trees = read_gold_trees(*config_.gold_trees);
    for (const auto& doc : discourse::read_gold_edus(*config_.gold_edus)) {
      const auto it = trees.find(doc.id);
      if (it == trees.end()) continue;
      std::string joined;
      for (const auto& e : doc.edus) joined += (joined.empty() ? "" : " ") + e;
      gold_.push_back({normalize_space(joined), doc.edus, it->second});
    }
  }
}

Engine Engine::load(const std::filesystem::path& config_path) {
  return Engine(Config::load(config_path));
}

void Engine::unavailable(const std::string& what) const {
  for (const auto& p : load_problems_) {
    if (p.rfind(what, 0) == 0) throw Error(ErrorCode::kAnalysisUnavailable, p);
  }
  throw Error(ErrorCode::kAnalysisUnavailable, what + " is not configured");
}

ConfigSnapshot Engine::snapshot() const {
  ConfigSnapshot s;
  s.weights_version = weights_ ? weights_->version : "";
  if (spoken_) s.lexicons.push_back(spoken_->name());
  if (subtitle_) s.lexicons.push_back(subtitle_->name());
  s.k = config_.k;
  return s;
}

text::Document Engine::parse_text(std::string_view raw) const {
  return text::parse_document(raw, abbreviations_, function_words_);
}

metrics::FeatureContext Engine::feature_context(const text::Document* source) const {
  metrics::FeatureContext ctx;
  ctx.spoken = spoken_ ? &*spoken_ : nullptr;
  ctx.subtitle = subtitle_ ? &*subtitle_ : nullptr;
  ctx.source = source;
  ctx.boundary = boundary_ ? &*boundary_ : nullptr;
  ctx.options = config_.features;
  return ctx;
}

genre::OrganizationScheme Engine::organization(const text::Document& doc) const {
  if (!genre_model_) unavailable("genre model");
  return genre::classify(*genre_model_, doc.sentences);
}

Analysis Engine::analyze(const text::Document& draft, const text::Document* source) const {
  if (!genre_model_) unavailable("genre model");
  if (!weights_) unavailable("facet weights");
  Analysis a;
  a.organization = genre::classify(*genre_model_, draft.sentences);
  a.required = config_.required_genres;
  a.missing = genre::completeness(a.organization, a.required);
  const auto ctx = feature_context(source);
  a.features = metrics::extract_features(draft, ctx);
  a.report = metrics::facet_report(draft, a.features, ctx, *weights_);
  a.guidance = guidance::generate(guidance_, a.report.draft, a.missing);
  for (const auto& s : draft.sentences) a.sentences.push_back(s.text);
  if (!source) a.warnings.push_back("no source text; rouge3_source is undefined");
  return a;
}

const Engine::GoldEntry* Engine::find_gold(const text::Document& source) const {
  const std::string key = normalize_space(source.raw);
  for (const auto& g : gold_) {
    if (g.normalized_text == key) return &g;
  }
  return nullptr;
}

nlohmann::json Engine::rst(const text::Document& source, const RstRequest& request) const {
  std::optional<std::size_t> paragraph;
  if (request.scope.rfind("paragraph_", 0) == 0) {
    const std::string digits = request.scope.substr(10);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) {
          return std::isdigit(static_cast<unsigned char>(c));
        })) {
      throw Error(ErrorCode::kInvalidArgument, "scope must be 'full' or 'paragraph_<i>'").with_field("scope");
    }
    paragraph = std::stoul(digits);
    if (*paragraph >= source.paragraphs.size()) {
      throw Error(ErrorCode::kIndexError, "paragraph " + digits + " out of range (" +
                                              std::to_string(source.paragraphs.size()) + " paragraphs)")
          .with_field("scope");
    }
  } else if (request.scope != "full") {
    throw Error(ErrorCode::kInvalidArgument, "scope must be 'full' or 'paragraph_<i>'").with_field("scope");
  }
  if (request.granularity != "sentence" && request.granularity != "edu") {
    throw Error(ErrorCode::kInvalidArgument, "granularity must be 'sentence' or 'edu'")
        .with_field("granularity");
  }

  std::vector<discourse::Edu> units;
  discourse::ParseResult result;
  if (request.parser == "gold") {
    if (paragraph) {
      throw Error(ErrorCode::kInvalidArgument, "gold trees are only available for scope=full")
          .with_field("scope");
    }
    const GoldEntry* gold = find_gold(source);
    if (!gold) throw Error(ErrorCode::kAnalysisUnavailable, "no gold annotation matches this source");
    // Locate each gold EDU in the normalized text to recover its sentence.
    const text::Document norm = parse_text(gold->normalized_text);
    std::size_t offset = 0;
    for (std::size_t i = 0; i < gold->edus.size(); ++i) {
      const std::string edu_text = normalize_space(gold->edus[i]);
      const std::size_t start = offset;
      offset += edu_text.size() + 1;
      discourse::Edu e;
      e.id = i;
      e.text = edu_text;
      for (std::size_t s = 0; s < norm.sentences.size(); ++s) {
        if (norm.sentences[s].span.start <= start) e.sentence = s;
      }
      e.paragraph = e.sentence < source.sentences.size() ? source.paragraph_of(e.sentence) : 0;
      const auto& sent = norm.sentences[e.sentence];
      bool begun = false;
      for (std::size_t t = 0; t < sent.tokens.size(); ++t) {
        const auto& tok = sent.tokens[t];
        if (tok.span.start < start || tok.span.start >= start + edu_text.size()) continue;
        if (!begun) e.token_begin = t;
        begun = true;
        e.token_end = t + 1;
        if (tok.is_word()) e.words.push_back(tok.lemma);
      }
      units.push_back(std::move(e));
    }
    const auto tree = discourse::parse_bracketed(gold->bracketed, relations_);
    discourse::ReplayPolicy replay(discourse::gold_actions(tree));
    result = discourse::parse(units, replay);
    if (request.granularity == "sentence") {
      auto sentences = discourse::sentence_units(source);
      result.tree = discourse::merge_to_sentences(result.tree, units, sentences);
      units = std::move(sentences);
    }
  } else {
    if (request.granularity == "edu") {
      units = discourse::segment_document(source, boundary_ ? &*boundary_ : nullptr);
      if (paragraph) {
        std::vector<discourse::Edu> kept;
        for (auto& e : units) {
          if (e.paragraph == *paragraph) kept.push_back(std::move(e));
        }
        units = renumber(std::move(kept));
      }
    } else {
      units = paragraph ? discourse::sentence_units(source, *paragraph) : discourse::sentence_units(source);
    }
    if (request.parser == "heuristic") {
      result = discourse::parse_heuristic(units);
    } else if (request.parser == "model") {
      if (!relation_model_) unavailable("relation model");
      discourse::ModelPolicy policy(*relation_model_);
      result = discourse::parse(units, policy);
    } else {
      throw Error(ErrorCode::kInvalidArgument, "parser must be 'heuristic', 'model' or 'gold'")
          .with_field("parser");
    }
  }

  const auto counts = discourse::relation_counts(result.tree);
  nlohmann::json satellites = nlohmann::json::object();
  for (const auto& [relation, n] : counts) {
    nlohmann::json spans = nlohmann::json::array();
    for (const auto& s : discourse::satellite_spans(result.tree, relation, relations_)) {
      spans.push_back({s.first, s.last});
    }
    satellites[relation] = std::move(spans);
  }
  nlohmann::json unit_list = nlohmann::json::array();
  for (const auto& u : units) {
    unit_list.push_back(
        {{"id", u.id}, {"text", u.text}, {"sentence", u.sentence}, {"paragraph", u.paragraph}});
  }
  return {{"scope", request.scope},
          {"granularity", request.granularity},
          {"parser", request.parser},
          {"units", std::move(unit_list)},
          {"tree", discourse::to_json(result.tree, units)},
          {"bracketed", discourse::to_bracketed(result.tree)},
          {"relation_counts", counts},
          {"satellite_spans", std::move(satellites)},
          {"transitions", result.actions.size()}};
}

align::AlignmentMap Engine::align(const text::Document& abstract, const text::Document& source,
                                  std::size_t k) const {
  if (alignment_backend_) return align::build(abstract, source, k, *alignment_backend_);
  return align::build(abstract, source, k, similarity::TfIdfBackend{});
}

draftgen::DraftPrompt Engine::prompt(const text::Document& source,
                                     std::optional<std::size_t> target_count) const {
  draftgen::DraftParams params = config_.draft;
  if (target_count) params.target_count = *target_count;
  const auto parsed = discourse::parse_heuristic(discourse::sentence_units(source));
  return draftgen::extract(source, params, &parsed.tree);
}

const std::string& Engine::strategies() const {
  if (!strategies_) unavailable("strategies text");
  return *strategies_;
}

}  // namespace coach::engine
