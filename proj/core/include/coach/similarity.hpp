#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "coach/text.hpp"

namespace coach::similarity {

using Matrix = std::vector<std::vector<double>>;
using SparseVector = std::map<std::string, double>;

double cosine(const SparseVector& a, const SparseVector& b);

// Raw lemma counts over word tokens.
SparseVector bag_of_lemmas(const text::Sentence& s);

// TF-IDF vectors with each sentence treated as a document:
// tf = raw count, idf = ln((1 + N) / (1 + df)) + 1.
std::vector<SparseVector> tfidf_vectors(const std::vector<const text::Sentence*>& sentences);

struct SimilarityResult {
  Matrix sim;  // rows x cols
  std::string backend;
  std::vector<std::string> warnings;
};

class SimilarityBackend {
 public:
  virtual ~SimilarityBackend() = default;
  virtual SimilarityResult similarity(const std::vector<text::Sentence>& rows,
                                      const std::vector<text::Sentence>& cols) const = 0;
};

class BagOfLemmasBackend : public SimilarityBackend {
 public:
  SimilarityResult similarity(const std::vector<text::Sentence>& rows,
                              const std::vector<text::Sentence>& cols) const override;
};

// IDF is fitted on rows and cols together.
class TfIdfBackend : public SimilarityBackend {
 public:
  SimilarityResult similarity(const std::vector<text::Sentence>& rows,
                              const std::vector<text::Sentence>& cols) const override;
};

// Returns a fixed matrix; used to inject hand-built similarities.
class FixedMatrixBackend : public SimilarityBackend {
 public:
  explicit FixedMatrixBackend(Matrix m) : m_(std::move(m)) {}
  SimilarityResult similarity(const std::vector<text::Sentence>& rows,
                              const std::vector<text::Sentence>& cols) const override;

 private:
  Matrix m_;
};

// Cosine over dense sentence embeddings produced by `embed` (typically a
// remote service). When the call throws or returns vectors of the wrong
// count or dimension, the TF-IDF result is returned with a warning.
class EmbeddingBackend : public SimilarityBackend {
 public:
  using EmbedFn = std::function<std::vector<std::vector<double>>(const std::vector<std::string>&)>;

  EmbeddingBackend(EmbedFn embed, std::size_t dimension)
      : embed_(std::move(embed)), dimension_(dimension) {}
  SimilarityResult similarity(const std::vector<text::Sentence>& rows,
                              const std::vector<text::Sentence>& cols) const override;

 private:
  EmbedFn embed_;
  std::size_t dimension_;
};

double dense_cosine(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace coach::similarity
