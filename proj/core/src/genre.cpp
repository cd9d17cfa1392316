#include "coach/genre.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "coach/error.hpp"
#include "coach/io.hpp"

namespace coach::genre {

std::string_view genre_name(GenreLabel g) {
  switch (g) {
    case GenreLabel::kBackground: return "background";
    case GenreLabel::kObjective: return "objective";
    case GenreLabel::kMethod: return "method";
    case GenreLabel::kResult: return "result";
    case GenreLabel::kConclusion: return "conclusion";
  }
  return "background";
}

std::optional<GenreLabel> genre_from_name(std::string_view name) {
  for (auto g : kAllGenres) {
    if (genre_name(g) == name) return g;
  }
  return std::nullopt;
}

std::size_t position_bucket(std::size_t ordinal, std::size_t count) {
  if (count == 0) return 0;
  return std::min(kNumPositionBuckets - 1, kNumPositionBuckets * ordinal / count);
}

std::vector<std::string> ngram_features(const text::Sentence& s) {
  std::vector<std::string> words;
  for (const auto& t : s.tokens) {
    if (t.is_word()) words.push_back(t.lemma);
  }
  std::vector<std::string> f;
  f.reserve(words.size() * 2);
  for (const auto& w : words) f.push_back("u:" + w);
  for (std::size_t i = 1; i < words.size(); ++i) f.push_back("b:" + words[i - 1] + " " + words[i]);
  return f;
}

LabelMapping::LabelMapping() {
  for (auto g : kAllGenres) add(genre_name(g), g);
  add("objectives", GenreLabel::kObjective);
  add("methods", GenreLabel::kMethod);
  add("results", GenreLabel::kResult);
  add("conclusions", GenreLabel::kConclusion);
}

LabelMapping LabelMapping::load(const std::filesystem::path& path) {
  LabelMapping m;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open label mapping " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::kFormatError, "expected foreign_label<TAB>genre", line_no);
    }
    const auto target = genre_from_name(text::to_lower_ascii(line.substr(tab + 1)));
    if (!target) {
      throw Error(ErrorCode::kFormatError, "unknown genre '" + line.substr(tab + 1) + "'", line_no);
    }
    m.add(line.substr(0, tab), *target);
  }
  return m;
}

void LabelMapping::add(std::string_view foreign, GenreLabel label) {
  table_[text::to_lower_ascii(foreign)] = label;
}

std::optional<GenreLabel> LabelMapping::map(std::string_view foreign) const {
  if (auto it = table_.find(text::to_lower_ascii(foreign)); it != table_.end()) return it->second;
  return std::nullopt;
}

std::vector<LabeledSentence> read_rct(std::istream& in, const LabelMapping& mapping) {
  std::vector<LabeledSentence> out;
  std::string line;
  std::string doc_id;
  std::size_t record_start = 0;
  std::size_t line_no = 0;
  auto close_record = [&] {
    const std::size_t count = out.size() - record_start;
    for (std::size_t i = record_start; i < out.size(); ++i) out[i].count = count;
    record_start = out.size();
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      close_record();
      continue;
    }
    if (line.rfind("###", 0) == 0) {
      close_record();
      doc_id = line.substr(3);
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::kFormatError, "expected LABEL<TAB>sentence", line_no);
    }
    const std::string label = line.substr(0, tab);
    const auto g = mapping.map(label);
    if (!g) throw Error(ErrorCode::kFormatError, "unknown label '" + label + "'", line_no);
    LabeledSentence ls;
    ls.doc_id = doc_id;
    ls.label = *g;
    ls.text = line.substr(tab + 1);
    ls.ordinal = out.size() - record_start;
    out.push_back(std::move(ls));
  }
  close_record();
  return out;
}

std::vector<LabeledSentence> read_rct(const std::filesystem::path& path,
                                      const LabelMapping& mapping) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return read_rct(in, mapping);
}

GenreModel train(const std::vector<LabeledSentence>& corpus, double alpha,
                 const text::WordList& function_words) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::kInvalidArgument, "alpha must be positive");
  GenreModel m;
  m.alpha_ = alpha;
  for (const auto& ls : corpus) {
    const auto c = static_cast<std::size_t>(ls.label);
    const auto sentence = text::make_sentence(ls.text, ls.ordinal, function_words);
    ++m.class_counts_[c];
    ++m.bucket_counts_[c][position_bucket(ls.ordinal, ls.count)];
    for (const auto& f : ngram_features(sentence)) {
      ++m.vocabulary_[f][c];
      ++m.feature_totals_[c];
    }
  }
  std::size_t populated = 0;
  for (auto n : m.class_counts_) populated += n > 0 ? 1 : 0;
  if (populated < 2) {
    throw Error(ErrorCode::kDegenerateCorpus, "training corpus must cover at least two genres");
  }
  m.finalize();
  return m;
}

void GenreModel::finalize() {
  std::size_t total = 0;
  for (auto n : class_counts_) total += n;
  const double v = static_cast<double>(vocabulary_.size());
  for (std::size_t c = 0; c < kNumGenres; ++c) {
    log_prior_[c] = class_counts_[c] == 0
                        ? -std::numeric_limits<double>::infinity()
                        : std::log(static_cast<double>(class_counts_[c]) / static_cast<double>(total));
    log_unseen_[c] = std::log(alpha_ / (static_cast<double>(feature_totals_[c]) + alpha_ * v));
    for (std::size_t b = 0; b < kNumPositionBuckets; ++b) {
      log_bucket_[c][b] = std::log((static_cast<double>(bucket_counts_[c][b]) + alpha_) /
                                   (static_cast<double>(class_counts_[c]) +
                                    alpha_ * static_cast<double>(kNumPositionBuckets)));
    }
  }
}

std::array<double, kNumGenres> GenreModel::class_scores(const text::Sentence& s,
                                                        std::size_t ordinal,
                                                        std::size_t count) const {
  const double v = static_cast<double>(vocabulary_.size());
  const std::size_t bucket = position_bucket(ordinal, count);
  std::array<double, kNumGenres> score{};
  for (std::size_t c = 0; c < kNumGenres; ++c) score[c] = log_prior_[c] + log_bucket_[c][bucket];
  for (const auto& f : ngram_features(s)) {
    const auto it = vocabulary_.find(f);
    if (it == vocabulary_.end()) continue;
    for (std::size_t c = 0; c < kNumGenres; ++c) {
      score[c] += std::log((static_cast<double>(it->second[c]) + alpha_) /
                           (static_cast<double>(feature_totals_[c]) + alpha_ * v));
    }
  }
  return score;
}

GenreLabel GenreModel::predict(const text::Sentence& s, std::size_t ordinal,
                               std::size_t count) const {
  const auto score = class_scores(s, ordinal, count);
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumGenres; ++c) {
    if (score[c] > score[best]) best = c;
  }
  return static_cast<GenreLabel>(best);
}

nlohmann::json GenreModel::to_json() const {
  nlohmann::json vocab = nlohmann::json::object();
  for (const auto& [f, counts] : vocabulary_) vocab[f] = counts;
  return {{"schema", 1},
          {"kind", "genre"},
          {"alpha", alpha_},
          {"class_counts", class_counts_},
          {"feature_totals", feature_totals_},
          {"bucket_counts", bucket_counts_},
          {"vocabulary", std::move(vocab)}};
}

GenreModel GenreModel::from_json(const nlohmann::json& j) {
  if (j.value("kind", "") != "genre" || j.value("schema", 0) != 1) {
    throw Error(ErrorCode::kFormatError, "not a schema-1 genre model");
  }
  GenreModel m;
  try {
    m.alpha_ = j.at("alpha").get<double>();
    m.class_counts_ = j.at("class_counts").get<std::array<std::size_t, kNumGenres>>();
    m.feature_totals_ = j.at("feature_totals").get<std::array<std::size_t, kNumGenres>>();
    m.bucket_counts_ =
        j.at("bucket_counts")
            .get<std::array<std::array<std::size_t, kNumPositionBuckets>, kNumGenres>>();
    for (const auto& [f, counts] : j.at("vocabulary").items()) {
      m.vocabulary_[f] = counts.get<std::array<std::size_t, kNumGenres>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("bad genre model: ") + e.what());
  }
  m.finalize();
  return m;
}

void GenreModel::save(const std::filesystem::path& path) const {
  io::write_file_atomic(path, to_json().dump() + "\n");
}

GenreModel GenreModel::load(const std::filesystem::path& path) {
  return from_json(io::read_json(path));
}

OrganizationScheme classify(const GenreModel& model, const std::vector<text::Sentence>& draft) {
  OrganizationScheme scheme;
  scheme.labels.reserve(draft.size());
  for (std::size_t i = 0; i < draft.size(); ++i) {
    scheme.labels.push_back(model.predict(draft[i], i, draft.size()));
  }
  return scheme;
}

std::set<GenreLabel> completeness(const OrganizationScheme& scheme,
                                  const std::set<GenreLabel>& required) {
  std::set<GenreLabel> missing = required;
  for (auto g : scheme.labels) missing.erase(g);
  return missing;
}

nlohmann::json to_json(const OrganizationScheme& scheme) {
  nlohmann::json j = nlohmann::json::array();
  for (auto g : scheme.labels) j.push_back(genre_name(g));
  return j;
}

}  // namespace coach::genre
