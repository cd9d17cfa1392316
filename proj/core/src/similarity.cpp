#include "coach/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "coach/error.hpp"

namespace coach::similarity {

double cosine(const SparseVector& a, const SparseVector& b) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (const auto& [k, v] : a) {
    na += v * v;
    if (auto it = b.find(k); it != b.end()) dot += v * it->second;
  }
  for (const auto& [k, v] : b) nb += v * v;
  if (na == 0.0 || nb == 0.0) return 0.0;
  // Clamp rounding noise so identical vectors give exactly 1.
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

SparseVector bag_of_lemmas(const text::Sentence& s) {
  SparseVector v;
  for (const auto& t : s.tokens) {
    if (t.is_word()) v[t.lemma] += 1.0;
  }
  return v;
}

std::vector<SparseVector> tfidf_vectors(const std::vector<const text::Sentence*>& sentences) {
  std::vector<SparseVector> tf;
  tf.reserve(sentences.size());
  std::map<std::string, double> df;
  for (const auto* s : sentences) {
    tf.push_back(bag_of_lemmas(*s));
    for (const auto& [term, count] : tf.back()) df[term] += 1.0;
  }
  const double n = static_cast<double>(sentences.size());
  for (auto& v : tf) {
    for (auto& [term, w] : v) w *= std::log((1.0 + n) / (1.0 + df[term])) + 1.0;
  }
  return tf;
}

SimilarityResult BagOfLemmasBackend::similarity(const std::vector<text::Sentence>& rows,
                                                const std::vector<text::Sentence>& cols) const {
  SimilarityResult r{{}, "bag-of-lemmas", {}};
  std::vector<SparseVector> cv;
  for (const auto& c : cols) cv.push_back(bag_of_lemmas(c));
  for (const auto& row : rows) {
    const SparseVector rv = bag_of_lemmas(row);
    std::vector<double> out;
    for (const auto& c : cv) out.push_back(cosine(rv, c));
    r.sim.push_back(std::move(out));
  }
  return r;
}

SimilarityResult TfIdfBackend::similarity(const std::vector<text::Sentence>& rows,
                                          const std::vector<text::Sentence>& cols) const {
  std::vector<const text::Sentence*> all;
  for (const auto& s : rows) all.push_back(&s);
  for (const auto& s : cols) all.push_back(&s);
  const auto vectors = tfidf_vectors(all);
  SimilarityResult r{{}, "tfidf", {}};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<double> out;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out.push_back(cosine(vectors[i], vectors[rows.size() + j]));
    }
    r.sim.push_back(std::move(out));
  }
  return r;
}

SimilarityResult FixedMatrixBackend::similarity(const std::vector<text::Sentence>& rows,
                                                const std::vector<text::Sentence>& cols) const {
  if (m_.size() != rows.size()) {
    throw Error(ErrorCode::kInvalidArgument, "fixed matrix row count does not match");
  }
  for (const auto& row : m_) {
    if (row.size() != cols.size()) {
      throw Error(ErrorCode::kInvalidArgument, "fixed matrix column count does not match");
    }
  }
  return {m_, "fixed", {}};
}

double dense_cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

SimilarityResult EmbeddingBackend::similarity(const std::vector<text::Sentence>& rows,
                                              const std::vector<text::Sentence>& cols) const {
  std::vector<std::string> texts;
  texts.reserve(rows.size() + cols.size());
  for (const auto& s : rows) texts.push_back(s.text);
  for (const auto& s : cols) texts.push_back(s.text);

  std::string failure;
  std::vector<std::vector<double>> vectors;
  try {
    vectors = embed_(texts);
    if (vectors.size() != texts.size()) {
      failure = "embedding service returned " + std::to_string(vectors.size()) + " vectors for " +
                std::to_string(texts.size()) + " sentences";
    }
    for (const auto& v : vectors) {
      if (!failure.empty()) break;
      if (v.size() != dimension_) failure = "embedding service returned a vector of wrong dimension";
      for (double x : v) {
        if (!std::isfinite(x)) failure = "embedding service returned a non-finite value";
      }
    }
  } catch (const std::exception& e) {
    failure = std::string("embedding service unavailable: ") + e.what();
  }
  if (!failure.empty()) {
    SimilarityResult r = TfIdfBackend{}.similarity(rows, cols);
    r.warnings.push_back(failure + "; fell back to tfidf");
    return r;
  }

  SimilarityResult r{{}, "embedding", {}};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<double> out;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out.push_back(dense_cosine(vectors[i], vectors[rows.size() + j]));
    }
    r.sim.push_back(std::move(out));
  }
  return r;
}

}  // namespace coach::similarity
