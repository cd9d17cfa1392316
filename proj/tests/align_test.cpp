#include <gtest/gtest.h>

#include <random>
#include <stdexcept>

#include "coach/align.hpp"
#include "coach/error.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace coach::align {
namespace {

using coach::testing::parse;

text::Document n_sentences(std::size_t n) {
  std::string raw;
  for (std::size_t i = 0; i < n; ++i) raw += "Sentence " + std::to_string(i) + ". ";
  return parse(raw);
}

TEST(Align, HandBuiltMatrix) {
  const auto m = from_matrix({{0.2, 0.9, 0.5}, {0.7, 0.1, 0.7}}, 2);
  EXPECT_EQ(m.topk_idx[0], (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(m.topk_idx[1], (std::vector<std::size_t>{0, 2}));  // tie -> lower index first
  EXPECT_NEAR(m.intensity[0], 0.7, 1e-12);
  EXPECT_NEAR(m.intensity[1], 0.7, 1e-12);
}

TEST(Align, IdenticalSentenceTopOne) {
  const auto abstract = parse("Dogs bark loudly at night.");
  const auto source = parse("Cats sleep all day. Dogs bark loudly at night. Birds sing.");
  const auto m = build(abstract, source, 1, similarity::TfIdfBackend());
  EXPECT_EQ(m.topk_idx[0], (std::vector<std::size_t>{1}));
  EXPECT_NEAR(m.intensity[0], 1.0, 1e-12);
  EXPECT_EQ(m.backend, "tfidf");
}

TEST(Align, FullKIsRowMean) {
  const auto m = from_matrix({{0.1, 0.2, 0.6}}, 3);
  EXPECT_NEAR(m.intensity[0], 0.3, 1e-12);
}

TEST(Align, InvalidKAndEmptyInput) {
  const auto a = parse("One sentence.");
  const auto s = parse("First. Second.");
  for (std::size_t k : {0u, 3u}) {
    try {
      build(a, s, k, similarity::TfIdfBackend());
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidK);
      EXPECT_EQ(e.field(), std::optional<std::string>("k"));
    }
  }
  try {
    build(text::Document{}, s, 1, similarity::TfIdfBackend());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyInput);
  }
}

TEST(Align, RandomMatricesMatchBruteForce) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<std::size_t> dim(1, 12);
  std::uniform_real_distribution<double> val(-0.2, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t rows = dim(rng);
    const std::size_t cols = dim(rng);
    similarity::Matrix sim(rows, std::vector<double>(cols));
    for (auto& r : sim) {
      for (auto& x : r) x = val(rng);
    }
    const auto abstract = n_sentences(rows);
    const auto source = n_sentences(cols);
    const similarity::FixedMatrixBackend mock(sim);
    std::vector<double> prev(rows, INFINITY);
    for (std::size_t k = 1; k <= cols; ++k) {
      const auto m = build(abstract, source, k, mock);
      for (std::size_t i = 0; i < rows; ++i) {
        EXPECT_NEAR(m.intensity[i], oracle::topk_mean(sim[i], k), 1e-12);
        EXPECT_LE(m.intensity[i], prev[i] + 1e-15);
        prev[i] = m.intensity[i];
        EXPECT_EQ(hover(m, i).topk_idx, m.topk_idx[i]);
        EXPECT_EQ(hover(m, i).scores, sim[i]);
      }
    }
  }
}

TEST(Align, FixedBackendThroughBuild) {
  const auto a = parse("One. Two.");
  const auto s = parse("Alpha. Beta. Gamma.");
  const similarity::FixedMatrixBackend mock({{0.3, 0.1, 0.2}, {0.0, 0.5, 0.4}});
  const auto m = build(a, s, 2, mock);
  EXPECT_EQ(m.rows(), 2u);
  EXPECT_EQ(m.cols(), 3u);
  EXPECT_NEAR(m.intensity[1], 0.45, 1e-12);
}

TEST(Hover, OutOfRange) {
  const auto m = from_matrix({{0.5, 0.5}}, 1);
  EXPECT_EQ(hover(m, 0).scores.size(), 2u);
  try {
    hover(m, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIndexError);
  }
}

TEST(Align, JsonShape) {
  const auto j = from_matrix({{-0.5, 0.25}}, 2).to_json();
  EXPECT_EQ(j.at("intensity_mode"), "raw");
  EXPECT_DOUBLE_EQ(j.at("intensity")[0].get<double>(), -0.125);
  EXPECT_EQ(j.at("k"), 2);
}

TEST(TopK, StableOnTies) {
  EXPECT_EQ(top_k({1.0, 1.0, 1.0}, 2), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(top_k({0.0, 2.0, 1.0}, 3), (std::vector<std::size_t>{1, 2, 0}));
}

TEST(EmbeddingBackend, UsesDenseVectors) {
  const similarity::EmbeddingBackend backend(
      [](const std::vector<std::string>& s) {
        std::vector<std::vector<double>> v;
        for (const auto& x : s) v.push_back({static_cast<double>(x.size()), 1.0});
        return v;
      },
      2);
  const auto r = backend.similarity(parse("Aa. Bbbb.").sentences, parse("Cc.").sentences);
  EXPECT_EQ(r.backend, "embedding");
  EXPECT_NEAR(r.sim[0][0], 1.0, 1e-12);  // both texts have length 3
  EXPECT_TRUE(r.warnings.empty());
}

TEST(EmbeddingBackend, FallsBackToTfIdf) {
  const auto rows = parse("Dogs bark. Cats sleep.").sentences;
  const auto cols = parse("Dogs bark.").sentences;
  const auto expected = similarity::TfIdfBackend().similarity(rows, cols).sim;
  const similarity::EmbeddingBackend failing(
      [](const std::vector<std::string>&) -> std::vector<std::vector<double>> {
        throw std::runtime_error("connection refused");
      },
      4);
  const similarity::EmbeddingBackend wrong_dim(
      [](const std::vector<std::string>& s) {
        return std::vector<std::vector<double>>(s.size(), std::vector<double>(3, 1.0));
      },
      4);
  for (const auto* b : {&failing, &wrong_dim}) {
    const auto r = b->similarity(rows, cols);
    EXPECT_EQ(r.backend, "tfidf");
    EXPECT_EQ(r.sim, expected);
    EXPECT_EQ(r.warnings.size(), 1u);
  }
}

TEST(Similarity, CosineBasics) {
  EXPECT_EQ(similarity::cosine({}, {{"a", 1.0}}), 0.0);
  EXPECT_NEAR(similarity::cosine({{"a", 1.0}, {"b", 1.0}}, {{"a", 2.0}}), 1.0 / std::sqrt(2.0),
              1e-12);
  EXPECT_EQ(similarity::dense_cosine({0.0, 0.0}, {1.0, 0.0}), 0.0);
}

TEST(Similarity, TfIdfWeights) {
  // Three one-sentence documents: "a b", "a c", "a". idf(a)=ln(4/4)+1=1, idf(b)=ln(4/2)+1.
  const auto doc = parse("A b. A c. A.");
  std::vector<const text::Sentence*> ptrs;
  for (const auto& s : doc.sentences) ptrs.push_back(&s);
  const auto v = similarity::tfidf_vectors(ptrs);
  EXPECT_NEAR(v[0].at("a"), 1.0, 1e-12);
  EXPECT_NEAR(v[0].at("b"), std::log(2.0) + 1.0, 1e-12);
}

}  // namespace
}  // namespace coach::align
