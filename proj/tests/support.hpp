#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "coach/discourse.hpp"
#include "coach/genre.hpp"
#include "coach/text.hpp"

namespace coach::testing {

inline std::filesystem::path data_dir() { return COACH_TEST_DATA_DIR; }

inline const text::WordList& function_words() {
  static const auto words = text::WordList::load(data_dir() / "function_words.txt");
  return words;
}

inline const text::WordList& abbreviations() {
  static const auto words = text::WordList::load(data_dir() / "abbreviations.txt");
  return words;
}

inline text::Document parse(std::string_view raw) {
  return text::parse_document(raw, abbreviations(), function_words());
}

inline std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// Tokens drawn uniformly from the first `vocab` letters-words "w0", "w1", ...
inline std::vector<std::string> random_stream(std::mt19937_64& rng, std::size_t length,
                                              std::size_t vocab) {
  std::uniform_int_distribution<std::size_t> pick(0, vocab - 1);
  std::vector<std::string> out;
  out.reserve(length);
  for (std::size_t i = 0; i < length; ++i) out.push_back("w" + std::to_string(pick(rng)));
  return out;
}

// EDUs with a few random words, spread over paragraphs of random size.
inline std::vector<discourse::Edu> random_edus(std::mt19937_64& rng, std::size_t n) {
  static const std::vector<std::string> words = {
      "we",     "study",   "however", "because", "model", "result", "for",  "example",
      "data",   "show",    "user",    "task",    "and",   "but",    "then", "therefore",
      "design", "improve", "system",  "report"};
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  std::uniform_int_distribution<std::size_t> len(1, 6);
  std::uniform_int_distribution<int> coin(0, 9);
  std::vector<discourse::Edu> edus;
  std::size_t paragraph = 0;
  std::size_t sentence = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && coin(rng) == 0) ++paragraph;
    if (i > 0 && coin(rng) < 5) ++sentence;
    discourse::Edu e;
    e.id = i;
    e.sentence = sentence;
    e.paragraph = paragraph;
    const std::size_t m = len(rng);
    for (std::size_t k = 0; k < m; ++k) {
      e.words.push_back(words[pick(rng)]);
      e.text += (k ? " " : "") + e.words.back();
    }
    e.token_end = m;
    edus.push_back(std::move(e));
  }
  return edus;
}

// Five-genre abstracts in which every class owns a disjoint vocabulary, so a
// correct classifier separates them perfectly.
inline std::vector<genre::LabeledSentence> separable_corpus(std::mt19937_64& rng,
                                                            std::size_t abstracts) {
  static const std::vector<std::vector<std::string>> vocab = {
      {"alder", "birch", "cedar", "dogwood", "elm"},
      {"agate", "beryl", "citrine", "diamond", "emerald"},
      {"anvil", "bellows", "chisel", "drill", "engraver"},
      {"azure", "bronze", "crimson", "denim", "ebony"},
      {"aster", "bluebell", "clover", "daisy", "edelweiss"}};
  std::uniform_int_distribution<std::size_t> pick(0, 4);
  std::uniform_int_distribution<std::size_t> len(3, 8);
  std::vector<genre::LabeledSentence> out;
  for (std::size_t a = 0; a < abstracts; ++a) {
    const std::string id = "sep" + std::to_string(a);
    for (std::size_t c = 0; c < genre::kNumGenres; ++c) {
      std::string text;
      const auto n = len(rng);
      for (std::size_t k = 0; k < n; ++k) text += (k ? " " : "") + vocab[c][pick(rng)];
      out.push_back({id, genre::kAllGenres[c], text + ".", c, genre::kNumGenres});
    }
  }
  return out;
}

}  // namespace coach::testing
