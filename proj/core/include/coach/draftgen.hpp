#pragma once

// Extractive first-draft prompt: picks the most central, paragraph-leading,
// nuclear sentences of the source and returns them in source order.

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coach/discourse.hpp"
#include "coach/text.hpp"

namespace coach::draftgen {

struct DraftParams {
  double alpha = 0.3;  // paragraph-initial bonus
  double beta = 0.3;   // nucleus bonus
  double gamma = 0.4;  // centrality
  std::size_t target_count = 6;

  static DraftParams from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct DraftSentence {
  std::size_t index = 0;  // sentence index in the source
  std::string text;
  double score = 0.0;
};

struct DraftPrompt {
  std::vector<DraftSentence> sentences;  // source order
  std::size_t target_count = 0;

  std::string text() const;  // sentences joined by single spaces
  nlohmann::json to_json() const;
};

// Per-sentence score components, exposed for inspection and tests.
struct SentenceScore {
  double position = 0.0;    // 1 for the first sentence of a paragraph
  double nucleus = 0.0;     // 1 / (1 + satellite depth); 0 without a tree
  double centrality = 0.0;  // mean TF-IDF cosine to the other sentences
  double total = 0.0;
};

// `rst`, when given, is a tree whose unit i is sentence i of `doc`.
std::vector<SentenceScore> score_sentences(const text::Document& doc, const DraftParams& params,
                                           const discourse::RstTree* rst);

// Throws kInvalidArgument when target_count is 0. Returns every sentence
// when target_count exceeds the sentence count. Ties go to the lower index.
DraftPrompt extract(const text::Document& doc, const DraftParams& params,
                    const discourse::RstTree* rst = nullptr);

}  // namespace coach::draftgen
