#include "coach/draftgen.hpp"

#include <algorithm>
#include <numeric>

#include "coach/error.hpp"
#include "coach/similarity.hpp"

namespace coach::draftgen {

DraftParams DraftParams::from_json(const nlohmann::json& j) {
  DraftParams p;
  p.alpha = j.value("alpha", p.alpha);
  p.beta = j.value("beta", p.beta);
  p.gamma = j.value("gamma", p.gamma);
  p.target_count = j.value("target_count", p.target_count);
  return p;
}

nlohmann::json DraftParams::to_json() const {
  return {{"alpha", alpha}, {"beta", beta}, {"gamma", gamma}, {"target_count", target_count}};
}

std::string DraftPrompt::text() const {
  std::string out;
  for (const auto& s : sentences) {
    if (!out.empty()) out += ' ';
    out += s.text;
  }
  return out;
}

nlohmann::json DraftPrompt::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : sentences) arr.push_back({{"index", s.index}, {"text", s.text}});
  return {{"sentences", std::move(arr)}, {"target_count", target_count}, {"text", text()}};
}

std::vector<SentenceScore> score_sentences(const text::Document& doc, const DraftParams& params,
                                           const discourse::RstTree* rst) {
  const std::size_t n = doc.sentences.size();
  if (rst && rst->leaf_count() != n) {
    throw Error(ErrorCode::kInvalidArgument, "rhetorical tree does not cover the document's sentences");
  }
  std::vector<const text::Sentence*> ptrs;
  for (const auto& s : doc.sentences) ptrs.push_back(&s);
  const auto vectors = similarity::tfidf_vectors(ptrs);

  std::vector<SentenceScore> scores(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& sc = scores[i];
    sc.position = doc.starts_paragraph(i) ? 1.0 : 0.0;
    if (rst) sc.nucleus = 1.0 / (1.0 + static_cast<double>(rst->satellite_depth(i)));
    if (n > 1) {
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) sum += similarity::cosine(vectors[i], vectors[j]);
      }
      sc.centrality = sum / static_cast<double>(n - 1);
    }
    sc.total = params.alpha * sc.position + params.beta * sc.nucleus + params.gamma * sc.centrality;
  }
  return scores;
}

DraftPrompt extract(const text::Document& doc, const DraftParams& params,
                    const discourse::RstTree* rst) {
  if (params.target_count == 0) {
    throw Error(ErrorCode::kInvalidArgument, "target_count must be at least 1").with_field("target_count");
  }
  const auto scores = score_sentences(doc, params, rst);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&scores](std::size_t a, std::size_t b) {
    return scores[a].total > scores[b].total;
  });
  order.resize(std::min(order.size(), params.target_count));
  std::sort(order.begin(), order.end());

  DraftPrompt prompt;
  prompt.target_count = params.target_count;
  for (auto i : order) prompt.sentences.push_back({i, doc.sentences[i].text, scores[i].total});
  return prompt;
}

}  // namespace coach::draftgen
