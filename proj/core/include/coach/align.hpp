#pragma once

// Sentence alignment between a reference abstract and its source text.

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coach/similarity.hpp"
#include "coach/text.hpp"

namespace coach::align {

struct AlignmentMap {
  similarity::Matrix sim;  // abstract sentences x source sentences
  std::size_t k = 1;
  std::vector<double> intensity;                // mean of the k largest scores per row
  std::vector<std::vector<std::size_t>> topk_idx;  // score descending, then index ascending
  std::string backend;
  std::vector<std::string> warnings;

  std::size_t rows() const { return sim.size(); }
  std::size_t cols() const { return sim.empty() ? 0 : sim.front().size(); }

  // Includes "intensity_mode": "raw" (signed scores are averaged unclipped).
  nlohmann::json to_json() const;
};

// Throws kInvalidK unless 1 <= k <= number of source sentences, and
// kEmptyInput when either document has no sentences.
AlignmentMap build(const text::Document& abstract, const text::Document& source, std::size_t k,
                   const similarity::SimilarityBackend& backend);

// Same summaries over a precomputed matrix.
AlignmentMap from_matrix(similarity::Matrix sim, std::size_t k, std::string backend = "matrix");

// Indices of the k largest entries of `row`, ties by lower index.
std::vector<std::size_t> top_k(const std::vector<double>& row, std::size_t k);

struct Hover {
  std::vector<double> scores;
  std::vector<std::size_t> topk_idx;
};

// Throws kIndexError when abstract_idx >= rows().
Hover hover(const AlignmentMap& map, std::size_t abstract_idx);

}  // namespace coach::align
