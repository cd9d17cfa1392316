#include <gtest/gtest.h>

#include <random>

#include "coach/error.hpp"
#include "coach/text.hpp"
#include "support.hpp"

namespace coach::text {
namespace {

using coach::testing::abbreviations;
using coach::testing::function_words;
using coach::testing::parse;

TEST(Segment, TwoSentencesOneParagraph) {
  const auto doc = parse("A b. C d.");
  ASSERT_EQ(doc.sentences.size(), 2u);
  EXPECT_EQ(doc.paragraphs.size(), 1u);
  EXPECT_EQ(doc.sentences[0].text, "A b.");
  EXPECT_EQ(doc.sentences[1].text, "C d.");
}

TEST(Segment, AbbreviationSuppressesSplit) {
  const auto doc = parse("Dr. Smith ran.");
  ASSERT_EQ(doc.sentences.size(), 1u);
}

TEST(Segment, WithoutAbbreviationListTheTitleSplits) {
  const auto doc = segment("Dr. Smith ran.", WordList{});
  EXPECT_EQ(doc.sentences.size(), 2u);
}

TEST(Segment, BlankLineStartsParagraph) {
  const auto doc = parse("Para1.\n\nPara2.");
  ASSERT_EQ(doc.paragraphs.size(), 2u);
  ASSERT_EQ(doc.sentences.size(), 2u);
  EXPECT_EQ(doc.paragraphs[0].size(), 1u);
  EXPECT_EQ(doc.paragraphs[1].size(), 1u);
  EXPECT_TRUE(doc.starts_paragraph(1));
  EXPECT_EQ(doc.paragraph_of(1), 1u);
}

TEST(Segment, LowercaseAfterPeriodDoesNotSplit) {
  EXPECT_EQ(parse("The value was 3. and more text follows.").sentences.size(), 1u);
}

TEST(Segment, QuestionAndExclamation) {
  EXPECT_EQ(parse("Why? Because! \"Quoted\" start.").sentences.size(), 3u);
}

TEST(Segment, SpansPointIntoRaw) {
  const std::string raw = "First one.  Second one here.\n\nThird.";
  const auto doc = parse(raw);
  for (const auto& s : doc.sentences) {
    EXPECT_EQ(raw.substr(s.span.start, s.span.size()), s.text);
    for (const auto& t : s.tokens) EXPECT_EQ(raw.substr(t.span.start, t.span.size()), t.surface);
  }
}

TEST(Segment, EmptyInputThrows) {
  try {
    parse(" \n\t ");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyInput);
  }
}

TEST(Segment, InvalidUtf8Throws) {
  try {
    parse("bad \xC3\x28 text.");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidEncoding);
  }
}

TEST(Tokenize, KeepsHyphensContractionsAndDecimals) {
  const auto toks = tokenize("state-of-the-art don't 3.14 end.");
  std::vector<std::string> surfaces;
  for (const auto& t : toks) surfaces.push_back(t.surface);
  EXPECT_EQ(surfaces, (std::vector<std::string>{"state-of-the-art", "don't", "3.14", "end", "."}));
  EXPECT_TRUE(toks.back().punct);
}

TEST(Tag, FunctionAndContent) {
  const auto s = make_sentence("the cat sat", 0, function_words());
  ASSERT_EQ(s.tokens.size(), 3u);
  EXPECT_EQ(s.tokens[0].word_class, WordClass::kFunction);
  EXPECT_EQ(s.tokens[1].word_class, WordClass::kContent);
  EXPECT_EQ(s.tokens[2].word_class, WordClass::kContent);
}

TEST(Tag, PrepositionsAreFunctionWords) {
  const auto s = make_sentence("on in at", 0, function_words());
  for (const auto& t : s.tokens) EXPECT_TRUE(t.is_function()) << t.surface;
}

TEST(Lemmatize, Examples) {
  EXPECT_EQ(lemmatize("Cats"), "cat");
  EXPECT_EQ(lemmatize("running"), "run");
  EXPECT_EQ(lemmatize("cat"), "cat");
  EXPECT_EQ(lemmatize("studies"), "study");
  EXPECT_EQ(lemmatize("boxes"), "box");
  EXPECT_EQ(lemmatize("ran"), "run");
  EXPECT_EQ(lemmatize("this"), "this");
  EXPECT_EQ(lemmatize("analyses"), "analysis");
}

TEST(Lemmatize, IdempotentOnRandomWords) {
  std::mt19937_64 rng(7);
  const std::string alphabet = "abcdeginrsy";
  std::uniform_int_distribution<std::size_t> len(1, 12);
  std::uniform_int_distribution<std::size_t> ch(0, alphabet.size() - 1);
  for (int i = 0; i < 5000; ++i) {
    std::string w;
    const auto n = len(rng);
    for (std::size_t k = 0; k < n; ++k) w += alphabet[ch(rng)];
    const auto once = lemmatize(w);
    EXPECT_EQ(lemmatize(once), once) << w;
  }
}

TEST(Lemmatize, ShippedFunctionWordsAreClosedUnderLemmatization) {
  // Tagging looks up lemmas, so every listed form must lemmatize to a listed form.
  for (const auto& w : function_words().entries()) {
    EXPECT_TRUE(function_words().contains(lemmatize(w))) << w << " -> " << lemmatize(w);
  }
}

TEST(WordList, CommentsAndCaseInsensitivity) {
  const auto list = WordList::parse("# comment\nThe\n\n  of  \n");
  EXPECT_EQ(list.size(), 2u);
  EXPECT_TRUE(list.contains("THE"));
  EXPECT_TRUE(list.contains("of"));
  EXPECT_FALSE(list.contains("#"));
}

TEST(Document, WordCountSkipsPunctuation) {
  EXPECT_EQ(parse("One two, three. Four!").word_count(), 4u);
}

}  // namespace
}  // namespace coach::text
