#include "coach/align.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "coach/error.hpp"

namespace coach::align {

std::vector<std::size_t> top_k(const std::vector<double>& row, std::size_t k) {
  std::vector<std::size_t> idx(row.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&row](std::size_t a, std::size_t b) { return row[a] > row[b]; });
  idx.resize(std::min(k, idx.size()));
  return idx;
}

AlignmentMap from_matrix(similarity::Matrix sim, std::size_t k, std::string backend) {
  if (sim.empty() || sim.front().empty()) {
    throw Error(ErrorCode::kEmptyInput, "alignment needs at least one sentence on each side");
  }
  const std::size_t n = sim.front().size();
  if (k < 1 || k > n) {
    throw Error(ErrorCode::kInvalidK, "k must be between 1 and " + std::to_string(n) + ", got " +
                                          std::to_string(k))
        .with_field("k");
  }
  AlignmentMap map;
  map.k = k;
  map.backend = std::move(backend);
  for (const auto& row : sim) {
    if (row.size() != n) throw Error(ErrorCode::kInvalidArgument, "ragged similarity matrix");
    for (double x : row) {
      if (!std::isfinite(x)) throw Error(ErrorCode::kInvalidArgument, "non-finite similarity");
    }
    auto idx = top_k(row, k);
    double sum = 0.0;
    for (auto j : idx) sum += row[j];
    map.intensity.push_back(sum / static_cast<double>(k));
    map.topk_idx.push_back(std::move(idx));
  }
  map.sim = std::move(sim);
  return map;
}

AlignmentMap build(const text::Document& abstract, const text::Document& source, std::size_t k,
                   const similarity::SimilarityBackend& backend) {
  if (abstract.empty() || source.empty()) {
    throw Error(ErrorCode::kEmptyInput, "alignment needs a non-empty abstract and source");
  }
  if (k < 1 || k > source.sentences.size()) {
    throw Error(ErrorCode::kInvalidK, "k must be between 1 and " +
                                          std::to_string(source.sentences.size()) + ", got " +
                                          std::to_string(k))
        .with_field("k");
  }
  auto result = backend.similarity(abstract.sentences, source.sentences);
  auto map = from_matrix(std::move(result.sim), k, result.backend);
  map.warnings = std::move(result.warnings);
  return map;
}

Hover hover(const AlignmentMap& map, std::size_t abstract_idx) {
  if (abstract_idx >= map.rows()) {
    throw Error(ErrorCode::kIndexError, "abstract sentence " + std::to_string(abstract_idx) +
                                            " out of range (" + std::to_string(map.rows()) +
                                            " sentences)");
  }
  return {map.sim[abstract_idx], map.topk_idx[abstract_idx]};
}

nlohmann::json AlignmentMap::to_json() const {
  return {{"k", k},
          {"sim", sim},
          {"intensity", intensity},
          {"topk_idx", topk_idx},
          {"intensity_mode", "raw"},
          {"backend", backend},
          {"warnings", warnings}};
}

}  // namespace coach::align
