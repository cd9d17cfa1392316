#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "coach/error.hpp"
#include "coach/metrics.hpp"
#include "metric_fixtures.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace coach::metrics {
namespace {

using coach::testing::data_dir;
using coach::testing::parse;
using coach::testing::random_stream;
using coach::testing::split_words;

TEST(MetricFixtures, AllMatchHandValues) {
  const auto fixtures = coach::testing::metric_fixtures();
  EXPECT_GE(fixtures.size(), 12u);
  for (const auto& f : fixtures) EXPECT_NEAR(f.compute(), f.expected, 1e-9) << f.name;
}

TEST(Ttr, UndefinedOnEmpty) {
  EXPECT_FALSE(ttr({}));
  EXPECT_FALSE(mattr({}, 5));
  EXPECT_FALSE(mtld({}));
  EXPECT_EQ(*ttr(split_words("a b c")), 1.0);
}

TEST(Mattr, WindowOneIsAlwaysOne) {
  std::mt19937_64 rng(1);
  EXPECT_EQ(*mattr(random_stream(rng, 40, 3), 1), 1.0);
  EXPECT_THROW(mattr(split_words("a"), 0), Error);
}

TEST(Mattr, ShortTextEqualsTtrExactly) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::size_t> len(1, 50);
  for (int i = 0; i < 200; ++i) {
    const auto t = random_stream(rng, len(rng), 12);
    EXPECT_EQ(*mattr(t, 50), *ttr(t));
  }
}

TEST(Mattr, MatchesWindowEnumeration) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const auto t = random_stream(rng, 120, 15);
    EXPECT_NEAR(*mattr(t, 25), oracle::mattr(t, 25), 1e-12);
  }
}

TEST(Mtld, MatchesStepTrace) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> len(1, 300);
  std::uniform_int_distribution<std::size_t> vocab(2, 60);
  for (int i = 0; i < 100; ++i) {
    const auto t = random_stream(rng, len(rng), vocab(rng));
    EXPECT_NEAR(*mtld(t), oracle::mtld(t, 0.72), 1e-9);
  }
}

TEST(Mtld, TraceOfEngineeredFixture) {
  std::vector<std::string> t;
  for (int i = 0; i < 5; ++i) {
    for (const auto& x : split_words("a b c d e f g a b c")) t.push_back(x);
  }
  const auto trace = oracle::mtld_trace(t, 0.72);
  EXPECT_EQ(trace.factor_ends, (std::vector<std::size_t>{10, 20, 30, 40, 50}));
  EXPECT_EQ(trace.partial, 0.0);
}

TEST(Mtld, ThresholdValidation) {
  EXPECT_THROW(mtld(split_words("a"), 1.0), Error);
  EXPECT_THROW(mtld(split_words("a"), 0.0), Error);
}

TEST(Rouge, IdentityAndDisjoint) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const auto t = random_stream(rng, 3 + i % 20, 6);
    for (std::size_t n = 1; n <= 3; ++n) EXPECT_EQ(rouge_n(t, t, n), 1.0);
  }
  EXPECT_EQ(rouge_n(split_words("a b c d"), split_words("e f g h"), 3), 0.0);
  EXPECT_EQ(rouge_n(split_words("a b c"), split_words("a b"), 3), 0.0);
  EXPECT_THROW(rouge_n(split_words("a"), split_words("a"), 0), Error);
}

TEST(Rouge, MatchesMultisetOracle) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 200; ++i) {
    const auto c = random_stream(rng, 1 + i % 17, 4);
    const auto r = random_stream(rng, 1 + i % 13, 4);
    for (std::size_t n = 1; n <= 4; ++n) EXPECT_NEAR(rouge_n(c, r, n), oracle::rouge(c, r, n), 1e-12);
  }
}

TEST(Rouge, ClippedRecallCanRiseWithN) {
  // Candidate reuses "b c" so bigram recall is complete while unigram "a" is clipped.
  const auto cand = split_words("b c a b c");
  const auto ref = split_words("a b c a");
  EXPECT_DOUBLE_EQ(rouge_n(cand, ref, 1), 0.75);
  EXPECT_DOUBLE_EQ(rouge_n(cand, ref, 2), 1.0);
}

TEST(Frequency, UndefinedAndConstant) {
  const Lexicon lex("t", {{"cat", 3.5}, {"dog", 3.5}});
  EXPECT_FALSE(frequency_feature(split_words("bird fish"), lex));
  EXPECT_EQ(*frequency_feature(split_words("cat dog cat"), lex), 3.5);
}

TEST(Lexicon, ParseLemmatizesAndKeepsMaximum) {
  const auto lex = Lexicon::parse("# c\nCats\t2.0\ncat\t3.0\nrunning\t1.5\n", "x");
  EXPECT_EQ(lex.score("cat"), 3.0);
  EXPECT_EQ(lex.score("run"), 1.5);
  try {
    Lexicon::parse("ok\t1\nbad line\n", "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.line(), std::optional<std::size_t>(2));
  }
  EXPECT_THROW(Lexicon::parse("w\tNaN\n", "x"), Error);
}

TEST(Fluency, SingleSentenceLeavesPairwiseUndefined) {
  const similarity::BagOfLemmasBackend bag;
  const auto f = fluency_features(parse("Only one sentence here."), bag);
  EXPECT_FALSE(f.adj_sent_similarity);
  EXPECT_FALSE(f.adj_function_overlap);
  EXPECT_TRUE(f.repeated_ratio);
}

TEST(Fluency, BinaryOverlap) {
  const similarity::BagOfLemmasBackend bag;
  const auto doc = parse("The cat is on the mat. The dog is on the rug.");
  EXPECT_EQ(*fluency_features(doc, bag).adj_function_overlap, 3.0);  // the, is, on
  EXPECT_EQ(*fluency_features(doc, bag, true).adj_function_overlap, 1.0);
}

TEST(Conciseness, SingleTenWordSentence) {
  const auto c = conciseness_features(parse("One two three four five six seven eight nine ten."));
  EXPECT_EQ(c.mean_sentence_length, 10.0);
  EXPECT_EQ(c.word_count, 10.0);
  EXPECT_EQ(c.mean_clause_length, 10.0);
}

FacetWeights uniform_weights() {
  FacetWeights w;
  w.version = "test";
  w.scale = 1.5;
  for (auto f : all_features()) w.norms[f] = {1.0, 2.0};
  using F = Feature;
  w.coefficients[0] = {{F::kFrequencyAll, 1.0}, {F::kFrequencyFunction, 1.0}};
  w.coefficients[1] = {{F::kRouge3Source, 1.0}};
  w.coefficients[2] = {{F::kAdjSentSimilarity, 1.0}, {F::kRepeatedLemmaPronounRatio, -1.0}};
  w.coefficients[3] = {{F::kTtrAll, 1.0}, {F::kMtldAll, 1.0}, {F::kSdDependentsNsubj, 1.0}};
  w.coefficients[4] = {{F::kWordCount, -2.0}, {F::kMeanClauseLength, -1.0}};
  return w;
}

FeatureVector at_mean(const FacetWeights& w) {
  FeatureVector fv;
  for (const auto& [f, n] : w.norms) fv[f] = n.mean;
  return fv;
}

TEST(Facets, ZeroVectorScoresMidpoint) {
  const auto w = uniform_weights();
  const auto s = facets(at_mean(w), w);
  for (auto f : kAllFacets) EXPECT_EQ(*s[f], 4.0);
  EXPECT_EQ(*s.overall, 4.0);
  EXPECT_TRUE(s.flags.empty());
}

TEST(Facets, HandBuiltVector) {
  const auto w = uniform_weights();
  auto fv = at_mean(w);
  // z = (x - 1) / 2.
  fv[Feature::kFrequencyAll] = 3.0;                // z 1
  fv[Feature::kFrequencyFunction] = 0.0;           // z -0.5
  fv[Feature::kRouge3Source] = 9.0;                // z 4 -> clamps at 7
  fv[Feature::kRepeatedLemmaPronounRatio] = 2.0;   // z 0.5, weight -1
  fv[Feature::kSdDependentsNsubj] = std::nullopt;  // skipped
  fv[Feature::kTtrAll] = 2.0;                      // z 0.5
  fv[Feature::kWordCount] = 5.0;                   // z 2, weight -2
  const auto s = facets(fv, w);
  EXPECT_NEAR(*s[Facet::kUnderstandability], 4.0 + 1.5 * (0.5 / 2.0), 1e-12);
  EXPECT_NEAR(*s[Facet::kConsistency], 7.0, 1e-12);
  EXPECT_NEAR(*s[Facet::kFluency], 4.0 + 1.5 * (-0.5 / 2.0), 1e-12);
  EXPECT_NEAR(*s[Facet::kDiversity], 4.0 + 1.5 * (0.5 / 2.0), 1e-12);
  EXPECT_NEAR(*s[Facet::kConciseness], 4.0 + 1.5 * (-4.0 / 3.0), 1e-12);
  double sum = 0.0;
  for (auto f : kAllFacets) sum += *s[f];
  EXPECT_NEAR(*s.overall, sum / 5.0, 1e-12);

  const auto o = oracle::facets(w.to_json(), fv.to_json());
  for (auto f : kAllFacets) EXPECT_NEAR(*o.facets.at(std::string(facet_name(f))), *s[f], 1e-12);
}

TEST(Facets, UndefinedFacetIsFlaggedAndExcludedFromOverall) {
  const auto w = uniform_weights();
  auto fv = at_mean(w);
  fv[Feature::kRouge3Source] = std::nullopt;
  fv[Feature::kFrequencyAll] = 5.0;  // z 2 with half the mass -> +1
  const auto s = facets(fv, w);
  EXPECT_FALSE(s[Facet::kConsistency]);
  EXPECT_EQ(s.flags, (std::vector<std::string>{"consistency: undefined"}));
  EXPECT_NEAR(*s.overall, (5.5 + 4.0 * 3) / 4.0, 1e-12);
}

TEST(Facets, MonotoneInPositivelyWeightedFeature) {
  const auto w = uniform_weights();
  auto fv = at_mean(w);
  double prev = -1.0;
  for (double z : {-1.0, -0.5, 0.0, 0.5, 1.0, 2.0}) {
    fv[Feature::kTtrAll] = 1.0 + 2.0 * z;
    const double d = *facets(fv, w)[Facet::kDiversity];
    EXPECT_GT(d, prev);
    prev = d;
  }
}

TEST(FacetWeights, ValidationAndRoundTrip) {
  auto w = uniform_weights();
  const auto back = FacetWeights::from_json(w.to_json());
  EXPECT_EQ(back.to_json(), w.to_json());
  w.norms.erase(Feature::kWordCount);
  EXPECT_THROW(w.validate(), Error);
  auto j = uniform_weights().to_json();
  j["norms"]["word_count"]["sd"] = 0.0;
  EXPECT_THROW(FacetWeights::from_json(j), Error);
  j = uniform_weights().to_json();
  j["facets"]["clarity"] = nlohmann::json::object();
  EXPECT_THROW(FacetWeights::from_json(j), Error);
}

TEST(FacetWeights, ShippedFileLoads) {
  const auto w = FacetWeights::load(data_dir() / "facet_weights.json");
  EXPECT_FALSE(w.version.empty());
  for (auto f : kAllFacets) EXPECT_FALSE(w.coefficients[static_cast<std::size_t>(f)].empty());
}

TEST(FitNorms, MeanAndPopulationSd) {
  std::vector<FeatureVector> corpus(4);
  const double xs[] = {1.0, 2.0, 3.0, 4.0};
  for (int i = 0; i < 4; ++i) {
    corpus[i][Feature::kWordCount] = xs[i];
    corpus[i][Feature::kTtrAll] = 0.5;  // constant -> omitted
  }
  const auto norms = fit_norms(corpus);
  ASSERT_EQ(norms.size(), 1u);
  EXPECT_DOUBLE_EQ(norms.at(Feature::kWordCount).mean, 2.5);
  EXPECT_DOUBLE_EQ(norms.at(Feature::kWordCount).sd, std::sqrt(1.25));
}

TEST(FeatureVector, JsonRoundTripAndNames) {
  FeatureVector fv;
  fv[Feature::kMtldAll] = 12.5;
  EXPECT_EQ(FeatureVector::from_json(fv.to_json()).to_json(), fv.to_json());
  for (auto f : all_features()) EXPECT_EQ(feature_from_name(feature_name(f)), f);
  EXPECT_THROW(FeatureVector::from_json({{"nope", 1}}), Error);
}

TEST(ExtractFeatures, UndefinedWithoutContext) {
  const auto fv = extract_features(parse("We built a tool. It helps writers."), FeatureContext{});
  EXPECT_FALSE(fv[Feature::kFrequencyAll]);
  EXPECT_FALSE(fv[Feature::kRouge3Source]);
  EXPECT_FALSE(fv[Feature::kSdDependentsNsubj]);
  EXPECT_TRUE(fv[Feature::kMtldAll]);
  EXPECT_EQ(*fv[Feature::kWordCount], 7.0);
}

TEST(ExtractFeatures, SourceIdentityGivesFullRouge) {
  const auto doc = parse("We built a tool for writers. It helps them revise.");
  FeatureContext ctx;
  ctx.source = &doc;
  EXPECT_EQ(*extract_features(doc, ctx)[Feature::kRouge3Source], 1.0);
}

TEST(FacetReport, OneGroupPerSentence) {
  const auto w = uniform_weights();
  const auto doc = parse("We built a tool. It helps writers. They like it.");
  FeatureContext ctx;
  ctx.source = &doc;
  const auto fv = extract_features(doc, ctx);
  const auto r = facet_report(doc, fv, ctx, w);
  EXPECT_EQ(r.per_sentence.size(), 3u);
  EXPECT_EQ(r.weights_version, "test");
}

}  // namespace
}  // namespace coach::metrics
