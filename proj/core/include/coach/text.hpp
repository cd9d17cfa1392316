#pragma once

// Rule-based text decomposition: paragraphs -> sentences -> tokens, with a
// content/function word-class tag on every token.

#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace coach::text {

enum class WordClass { kContent, kFunction };

// Byte offsets into the source document, half-open.
struct CharSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  friend bool operator==(const CharSpan&, const CharSpan&) = default;
};

struct Token {
  std::string surface;
  std::string lemma;
  WordClass word_class = WordClass::kContent;
  CharSpan span;
  bool punct = false;

  bool is_word() const { return !punct; }
  bool is_function() const { return word_class == WordClass::kFunction; }
  bool is_content_word() const { return !punct && word_class == WordClass::kContent; }
};

struct Sentence {
  std::vector<Token> tokens;
  std::size_t index = 0;
  std::string text;
  CharSpan span;

  std::size_t word_count() const;
};

// Half-open range of sentence indices.
struct Paragraph {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t size() const { return last - first; }
};

struct Document {
  std::vector<Paragraph> paragraphs;
  std::vector<Sentence> sentences;
  std::string raw;

  bool empty() const { return sentences.empty(); }
  std::size_t paragraph_of(std::size_t sentence) const;
  bool starts_paragraph(std::size_t sentence) const;
  std::size_t word_count() const;
};

// A newline-separated word list with `#` comments. Entries are compared
// case-insensitively.
class WordList {
 public:
  WordList() = default;
  WordList(std::initializer_list<std::string_view> entries);

  static WordList parse(std::string_view content);
  static WordList load(const std::filesystem::path& path);

  bool contains(std::string_view word) const;
  std::size_t size() const { return entries_.size(); }
  const std::set<std::string, std::less<>>& entries() const { return entries_; }

 private:
  std::set<std::string, std::less<>> entries_;
};

std::string to_lower_ascii(std::string_view s);

// Lowercases and strips plural, -ing and -ed suffixes. The rules are applied
// until nothing changes, so the result is always a fixed point.
std::string lemmatize(std::string_view surface);

// Splits `text` into word and punctuation tokens. Spans are offset by `base`.
// Hyphenated words, contractions and decimal numbers stay whole.
std::vector<Token> tokenize(std::string_view text, std::size_t base = 0);

Sentence tag(Sentence sentence, const WordList& function_words);

// Throws Error(kEmptyInput) for blank input, Error(kInvalidEncoding) for
// malformed UTF-8. Tokens are lemmatized but not tagged.
Document segment(std::string_view raw, const WordList& abbreviations);

// segment() followed by tag() on every sentence.
Document parse_document(std::string_view raw, const WordList& abbreviations,
                        const WordList& function_words);

// A standalone sentence (training data, single lines) tokenized and tagged.
Sentence make_sentence(std::string_view text, std::size_t index,
                       const WordList& function_words);

bool is_valid_utf8(std::string_view s);

}  // namespace coach::text
