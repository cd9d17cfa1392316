#include "coach/text.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "coach/error.hpp"

namespace coach::text {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_ascii_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}

// Length of the UTF-8 sequence starting at s[i] (1 for ASCII).
std::size_t utf8_length(std::string_view s, std::size_t i) {
  const auto b = static_cast<unsigned char>(s[i]);
  std::size_t n = 1;
  if (b >= 0xF0) {
    n = 4;
  } else if (b >= 0xE0) {
    n = 3;
  } else if (b >= 0xC0) {
    n = 2;
  }
  return std::min(n, s.size() - i);
}

// General-punctuation block characters (curly quotes, dashes, ellipsis).
bool is_unicode_punct(std::string_view s, std::size_t i) {
  if (i + 2 >= s.size()) return false;
  const auto b0 = static_cast<unsigned char>(s[i]);
  const auto b1 = static_cast<unsigned char>(s[i + 1]);
  const auto b2 = static_cast<unsigned char>(s[i + 2]);
  return b0 == 0xE2 && b1 == 0x80 && b2 >= 0x90 && b2 <= 0xBF;
}

bool is_word_byte(std::string_view s, std::size_t i) {
  const auto b = static_cast<unsigned char>(s[i]);
  if (b < 0x80) return is_ascii_alnum(s[i]);
  return !is_unicode_punct(s, i);
}

bool is_right_single_quote(std::string_view s, std::size_t i) {
  return s.substr(i, 3) == "\xE2\x80\x99";
}

// Irregular forms plus words the suffix rules would damage.
const std::map<std::string, std::string, std::less<>>& lemma_exceptions() {
  static const std::map<std::string, std::string, std::less<>> table = {
      {"does", "do"},         {"goes", "go"},           {"children", "child"},
      {"men", "man"},         {"women", "woman"},       {"people", "people"},
      {"data", "data"},       {"analyses", "analysis"}, {"hypotheses", "hypothesis"},
      {"criteria", "criterion"}, {"phenomena", "phenomenon"},
      {"feet", "foot"},       {"mice", "mouse"},        {"teeth", "tooth"},
      {"ran", "run"},         {"during", "during"},
      {"nothing", "nothing"}, {"something", "something"}, {"anything", "anything"},
      {"everything", "everything"}, {"morning", "morning"}, {"evening", "evening"},
      {"always", "always"},   {"perhaps", "perhaps"},   {"whereas", "whereas"},
      {"towards", "towards"}, {"afterwards", "afterwards"}, {"besides", "besides"},
      {"thus", "thus"},       {"plus", "plus"},         {"news", "news"},
      {"series", "series"},   {"species", "species"},   {"lens", "lens"},
      {"yes", "yes"},         {"sometimes", "sometimes"}, {"otherwise", "otherwise"},
      {"upwards", "upwards"}, {"downwards", "downwards"}, {"backwards", "backwards"},
      {"forwards", "forwards"}, {"nevertheless", "nevertheless"},
      {"regardless", "regardless"}, {"unless", "unless"}, {"less", "less"},
      {"various", "various"}, {"previous", "previous"}, {"numerous", "numerous"},
      {"indeed", "indeed"},   {"need", "need"},         {"exceed", "exceed"},
      {"bed", "bed"},         {"red", "red"},           {"shed", "shed"},
      {"hundred", "hundred"}, {"sacred", "sacred"},     {"kindred", "kindred"},
      {"was", "was"},         {"has", "has"},           {"is", "is"},
      {"his", "his"},         {"its", "its"},           {"this", "this"},
      {"us", "us"},           {"as", "as"},             {"yours", "yours"},
      {"ours", "ours"},       {"hers", "hers"},         {"theirs", "theirs"},
      {"whose", "whose"},     {"themselves", "themselves"},
      {"ourselves", "ourselves"}, {"yourselves", "yourselves"},
      {"according", "according"}, {"including", "including"},
      {"regarding", "regarding"}, {"concerning", "concerning"},
      {"following", "following"}, {"notwithstanding", "notwithstanding"},
      {"given", "given"},     {"having", "have"},     {"being", "being"},
  };
  return table;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool has_vowel(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return is_vowel(c); });
}

bool is_alpha_word(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
           return (c >= 'a' && c <= 'z');
         });
}

std::string undouble(std::string stem) {
  const std::size_t n = stem.size();
  if (n >= 3 && stem[n - 1] == stem[n - 2] && !is_vowel(stem[n - 1]) &&
      stem[n - 1] != 'l' && stem[n - 1] != 's' && stem[n - 1] != 'z') {
    stem.pop_back();
  }
  return stem;
}

std::string lemmatize_once(const std::string& w) {
  const auto& exceptions = lemma_exceptions();
  if (auto it = exceptions.find(w); it != exceptions.end()) return it->second;
  if (!is_alpha_word(w)) return w;

  const std::size_t n = w.size();
  if (n > 4 && ends_with(w, "ies")) return w.substr(0, n - 3) + "y";
  if (n > 4 && (ends_with(w, "sses") || ends_with(w, "shes") || ends_with(w, "ches") ||
                ends_with(w, "xes") || ends_with(w, "zes"))) {
    return w.substr(0, n - 2);
  }
  if (n > 3 && ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") &&
      !ends_with(w, "is")) {
    return w.substr(0, n - 1);
  }
  if (n >= 6 && ends_with(w, "ing")) {
    const std::string stem = w.substr(0, n - 3);
    if (has_vowel(stem)) return undouble(stem);
  }
  if (n >= 5 && ends_with(w, "ed") && w[n - 3] != 'e') {
    const std::string stem = w.substr(0, n - 2);
    if (has_vowel(stem)) return undouble(stem);
  }
  return w;
}

}  // namespace

std::size_t Sentence::word_count() const {
  return static_cast<std::size_t>(
      std::count_if(tokens.begin(), tokens.end(), [](const Token& t) { return t.is_word(); }));
}

std::size_t Document::paragraph_of(std::size_t sentence) const {
  for (std::size_t p = 0; p < paragraphs.size(); ++p) {
    if (sentence >= paragraphs[p].first && sentence < paragraphs[p].last) return p;
  }
  return paragraphs.empty() ? 0 : paragraphs.size() - 1;
}

bool Document::starts_paragraph(std::size_t sentence) const {
  return std::any_of(paragraphs.begin(), paragraphs.end(),
                     [&](const Paragraph& p) { return p.first == sentence; });
}

std::size_t Document::word_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.word_count();
  return n;
}

WordList::WordList(std::initializer_list<std::string_view> entries) {
  for (auto e : entries) entries_.insert(to_lower_ascii(e));
}

WordList WordList::parse(std::string_view content) {
  WordList list;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t eol = content.find('\n', pos);
    if (eol == std::string_view::npos) eol = content.size();
    std::string_view line = content.substr(pos, eol - pos);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    while (!line.empty() && is_space(line.front())) line.remove_prefix(1);
    while (!line.empty() && is_space(line.back())) line.remove_suffix(1);
    if (!line.empty()) list.entries_.insert(to_lower_ascii(line));
    pos = eol + 1;
  }
  return list;
}

WordList WordList::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open word list " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

bool WordList::contains(std::string_view word) const {
  return entries_.find(to_lower_ascii(word)) != entries_.end();
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string lemmatize(std::string_view surface) {
  std::string current = to_lower_ascii(surface);
  // Each rule either hits the exception table (whose values are fixed points)
  // or shortens the word, so this terminates.
  for (;;) {
    std::string next = lemmatize_once(current);
    if (next == current) return current;
    current = std::move(next);
  }
}

bool is_valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b = static_cast<unsigned char>(s[i]);
    std::size_t n = 0;
    if (b < 0x80) {
      n = 1;
    } else if ((b & 0xE0) == 0xC0 && b >= 0xC2) {
      n = 2;
    } else if ((b & 0xF0) == 0xE0) {
      n = 3;
    } else if ((b & 0xF8) == 0xF0 && b <= 0xF4) {
      n = 4;
    } else {
      return false;
    }
    if (i + n > s.size()) return false;
    for (std::size_t k = 1; k < n; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return false;
    }
    i += n;
  }
  return true;
}

std::vector<Token> tokenize(std::string_view text, std::size_t base) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    if (is_space(text[i])) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (is_word_byte(text, i)) {
      i += utf8_length(text, i);
      for (;;) {
        if (i < n && is_word_byte(text, i)) {
          i += utf8_length(text, i);
          continue;
        }
        // Joiners stay inside a word only when a word character follows.
        std::size_t joiner = 0;
        if (i < n && (text[i] == '-' || text[i] == '\'')) {
          joiner = 1;
        } else if (i < n && is_right_single_quote(text, i)) {
          joiner = 3;
        } else if (i < n && (text[i] == '.' || text[i] == ',') && is_digit(text[i - 1]) &&
                   i + 1 < n && is_digit(text[i + 1])) {
          joiner = 1;
        }
        if (joiner > 0 && i + joiner < n && is_word_byte(text, i + joiner)) {
          i += joiner;
          continue;
        }
        break;
      }
      Token t;
      t.surface = std::string(text.substr(start, i - start));
      t.lemma = lemmatize(t.surface);
      t.span = {base + start, base + i};
      tokens.push_back(std::move(t));
    } else {
      i += utf8_length(text, i);
      Token t;
      t.surface = std::string(text.substr(start, i - start));
      t.lemma = t.surface;
      t.span = {base + start, base + i};
      t.punct = true;
      tokens.push_back(std::move(t));
    }
  }
  return tokens;
}

Sentence tag(Sentence sentence, const WordList& function_words) {
  for (auto& t : sentence.tokens) {
    t.word_class = function_words.contains(t.lemma) ? WordClass::kFunction : WordClass::kContent;
  }
  return sentence;
}

namespace {

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

// Closing quotes/brackets allowed between a terminator and the whitespace.
std::size_t closer_length(std::string_view s, std::size_t i) {
  if (i >= s.size()) return 0;
  if (s[i] == '"' || s[i] == '\'' || s[i] == ')' || s[i] == ']') return 1;
  if (s.substr(i, 3) == "\xE2\x80\x9D" || s.substr(i, 3) == "\xE2\x80\x99") return 3;
  return 0;
}

bool opens_sentence(std::string_view s, std::size_t i) {
  if (i >= s.size()) return false;
  const char c = s[i];
  if (c >= 'A' && c <= 'Z') return true;
  if (c == '"' || c == '\'') return true;
  return s.substr(i, 3) == "\xE2\x80\x9C" || s.substr(i, 3) == "\xE2\x80\x98";
}

// The whitespace-delimited chunk that ends at `dot` (inclusive), stripped of
// leading brackets and quotes.
std::string_view chunk_before(std::string_view s, std::size_t lo, std::size_t dot) {
  std::size_t b = dot;
  while (b > lo && !is_space(s[b - 1])) --b;
  std::string_view chunk = s.substr(b, dot + 1 - b);
  while (!chunk.empty() && (chunk.front() == '(' || chunk.front() == '"' ||
                            chunk.front() == '\'' || chunk.front() == '[')) {
    chunk.remove_prefix(1);
  }
  return chunk;
}

void add_sentence(Document& doc, std::size_t start, std::size_t end) {
  const std::string_view raw = doc.raw;
  while (start < end && is_space(raw[start])) ++start;
  while (end > start && is_space(raw[end - 1])) --end;
  if (start == end) return;
  Sentence s;
  s.index = doc.sentences.size();
  s.span = {start, end};
  s.text = std::string(raw.substr(start, end - start));
  s.tokens = tokenize(raw.substr(start, end - start), start);
  doc.sentences.push_back(std::move(s));
}

void split_paragraph(Document& doc, std::size_t lo, std::size_t hi,
                     const WordList& abbreviations) {
  const std::string_view raw = doc.raw;
  std::size_t sentence_start = lo;
  std::size_t i = lo;
  while (i < hi) {
    if (!is_terminator(raw[i])) {
      ++i;
      continue;
    }
    const std::size_t first_term = i;
    while (i < hi && is_terminator(raw[i])) ++i;
    const std::size_t last_term = i - 1;
    for (std::size_t c = closer_length(raw, i); c > 0 && i + c <= hi; c = closer_length(raw, i)) {
      i += c;
    }
    if (i >= hi || !is_space(raw[i])) continue;
    std::size_t next = i;
    while (next < hi && is_space(raw[next])) ++next;
    if (next >= hi || !opens_sentence(raw, next)) continue;
    if (first_term == last_term && raw[last_term] == '.' &&
        abbreviations.contains(chunk_before(raw, lo, last_term))) {
      continue;
    }
    add_sentence(doc, sentence_start, i);
    sentence_start = i;
  }
  add_sentence(doc, sentence_start, hi);
}

}  // namespace

Document segment(std::string_view raw, const WordList& abbreviations) {
  if (!is_valid_utf8(raw)) throw Error(ErrorCode::kInvalidEncoding, "input is not valid UTF-8");
  if (std::all_of(raw.begin(), raw.end(), is_space)) {
    throw Error(ErrorCode::kEmptyInput, "input text is empty");
  }
  Document doc;
  doc.raw = std::string(raw);

  // Paragraphs are separated by lines containing only whitespace.
  std::size_t para_start = 0;
  std::size_t pos = 0;
  auto close_paragraph = [&](std::size_t end) {
    const std::size_t before = doc.sentences.size();
    split_paragraph(doc, para_start, end, abbreviations);
    if (doc.sentences.size() > before) doc.paragraphs.push_back({before, doc.sentences.size()});
  };
  while (pos < raw.size()) {
    std::size_t eol = raw.find('\n', pos);
    const std::size_t line_end = eol == std::string_view::npos ? raw.size() : eol;
    const std::string_view line = raw.substr(pos, line_end - pos);
    if (std::all_of(line.begin(), line.end(), is_space) && pos > para_start) {
      close_paragraph(pos);
      para_start = line_end;
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  close_paragraph(raw.size());
  return doc;
}

Document parse_document(std::string_view raw, const WordList& abbreviations,
                        const WordList& function_words) {
  Document doc = segment(raw, abbreviations);
  for (auto& s : doc.sentences) s = tag(std::move(s), function_words);
  return doc;
}

Sentence make_sentence(std::string_view text, std::size_t index,
                       const WordList& function_words) {
  Sentence s;
  s.index = index;
  s.text = std::string(text);
  s.span = {0, text.size()};
  s.tokens = tokenize(text, 0);
  return tag(std::move(s), function_words);
}

}  // namespace coach::text
