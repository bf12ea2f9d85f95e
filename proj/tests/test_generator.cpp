#include <cmath>

#include <gtest/gtest.h>

#include "tspra/analysis.hpp"
#include "tspra/common.hpp"
#include "tspra/generator.hpp"
#include "tspra/model_core.hpp"

using namespace tspra;

namespace {

GenSpec small_spec() {
  GenSpec g;
  g.num_reviews = 80;
  g.doc_length_mean = 12;
  g.seed = 9;
  return g;
}

std::vector<double> constant_rows(std::size_t rows, std::vector<double> row) {
  std::vector<double> out;
  for (std::size_t r = 0; r < rows; ++r) out.insert(out.end(), row.begin(), row.end());
  return out;
}

}  // namespace

TEST(Generate, AllNeutralSentimentsGiveMuEverywhere) {
  GenSpec g = small_spec();
  g.pi = constant_rows(g.num_topics * g.vocab_size, {0.0, 1.0, 0.0});
  const auto synth = generate(g);
  for (double r : synth.review_mean) EXPECT_DOUBLE_EQ(r, g.hyper.mu);
}

TEST(Generate, StrongPositiveEverywhereGivesFive) {
  GenSpec g = small_spec();
  g.pi = constant_rows(g.num_topics * g.vocab_size, {0.0, 0.0, 1.0});
  g.psi = constant_rows(g.num_topics * g.num_authors, {0.0, 1.0});
  const auto synth = generate(g);
  for (std::size_t d = 0; d < synth.corpus.reviews.size(); ++d) {
    EXPECT_DOUBLE_EQ(synth.review_mean[d], 5.0);
    EXPECT_LE(synth.corpus.reviews[d].rating, 5.0);
    EXPECT_GT(synth.corpus.reviews[d].rating, 4.0);
  }
}

TEST(Generate, RatingNoiseHasZeroMean) {
  GenSpec g;
  g.num_reviews = 10000;
  g.doc_length_mean = 5;
  g.doc_length_min = 1;
  g.seed = 31;
  const auto synth = generate(g);
  double sum = 0.0;
  for (std::size_t d = 0; d < synth.raw_rating.size(); ++d) sum += synth.raw_rating[d] - synth.review_mean[d];
  const double mean = sum / static_cast<double>(synth.raw_rating.size());
  EXPECT_LT(std::abs(mean), 3.0 * std::sqrt(g.hyper.sigma2) / 100.0);
}

TEST(Generate, GroundTruthSatisfiesCountInvariants) {
  const auto synth = generate(small_spec());
  const CountTables counts = recount(synth.assignments, synth.corpus);
  EXPECT_FALSE(check_marginals(counts, synth.corpus));
  for (std::size_t d = 0; d < synth.corpus.reviews.size(); ++d) {
    const auto& doc = synth.assignments.docs[d];
    const auto& review = synth.corpus.reviews[d];
    EXPECT_GE(review.tokens.size(), small_spec().doc_length_min);
    for (std::size_t i = 0; i < review.tokens.size(); ++i) {
      EXPECT_EQ(doc.word_rating[i], word_rating(doc.preference[i], doc.sentiment[i], synth.hyper.mu));
    }
  }
}

TEST(Generate, Deterministic) {
  const auto a = generate(small_spec());
  const auto b = generate(small_spec());
  ASSERT_EQ(a.corpus.reviews.size(), b.corpus.reviews.size());
  for (std::size_t d = 0; d < a.corpus.reviews.size(); ++d) {
    EXPECT_EQ(a.corpus.reviews[d].tokens, b.corpus.reviews[d].tokens);
    EXPECT_EQ(a.corpus.reviews[d].rating, b.corpus.reviews[d].rating);
  }
  EXPECT_EQ(a.phi, b.phi);
}

TEST(Generate, MaterializingTablesFirstChangesNothing) {
  const auto a = generate(small_spec());
  const auto b = generate(materialize_tables(small_spec()));
  ASSERT_EQ(a.corpus.reviews.size(), b.corpus.reviews.size());
  for (std::size_t d = 0; d < a.corpus.reviews.size(); ++d) {
    EXPECT_EQ(a.corpus.reviews[d].tokens, b.corpus.reviews[d].tokens);
  }
}

TEST(Generate, ValidationRejectsBadSpecs) {
  GenSpec g = small_spec();
  g.num_topics = 0;
  EXPECT_THROW(g.validate(), Error);
  g = small_spec();
  g.phi = {0.5, 0.5};
  EXPECT_THROW(g.validate(), Error);
  g = small_spec();
  g.sentiment_prior = {{1.0, -1.0, 1.0}};
  EXPECT_THROW(g.validate(), Error);
}

TEST(PlantCriticalAspect, LevelsHoldOnThePlantedTables) {
  const double levels[][2] = {{0.6, -0.4}, {0.65, 0.6}, {0.6, 0.2}, {0.1, -0.9}, {1.0, 1.0}, {0.0, 0.0}};
  for (const auto& lv : levels) {
    GenSpec g = plant_critical_aspect(small_spec(), 1, lv[0], lv[1]);
    g.num_reviews = 5;
    const TrainedModel truth = truth_model(generate(g));
    EXPECT_NEAR(aspect_preference(truth, 1), lv[0], 0.02);
    EXPECT_NEAR(aspect_sentiment(truth, 1), lv[1], 0.02);
  }
}

TEST(PlantCriticalAspect, RuleOutcomesOnPlantedLevels) {
  auto flagged = [](double p, double s) {
    GenSpec g = plant_critical_aspect(small_spec(), 0, p, s);
    g.num_reviews = 5;
    const TrainedModel truth = truth_model(generate(g));
    return is_critical(aspect_preference(truth, 0), aspect_sentiment(truth, 0));
  };
  EXPECT_TRUE(flagged(0.6, -0.4));
  EXPECT_TRUE(flagged(0.6, 0.2));
  for (double s : {-0.9, -0.2, 0.0, 0.3, 0.9}) EXPECT_FALSE(flagged(0.1, s));
}

TEST(PlantCriticalAspect, InfeasibleRequestsThrow) {
  auto kind_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kInvalidArgument;
  };
  EXPECT_EQ(kind_of([] { plant_critical_aspect(small_spec(), 0, 1.2, 0.0); }), ErrorKind::kInfeasible);
  EXPECT_EQ(kind_of([] { plant_critical_aspect(small_spec(), 0, 0.5, -1.5); }), ErrorKind::kInfeasible);
  EXPECT_EQ(kind_of([] { plant_critical_aspect(small_spec(), 7, 0.5, 0.5); }), ErrorKind::kInfeasible);
  GenSpec neutral = small_spec();
  neutral.pi = constant_rows(neutral.num_topics * neutral.vocab_size, {0.0, 1.0, 0.0});
  EXPECT_EQ(kind_of([&] { plant_critical_aspect(neutral, 0, 0.5, 0.5); }), ErrorKind::kInfeasible);
}

TEST(GenSpecJson, RoundTripReproducesTheCorpus) {
  GenSpec g = plant_critical_aspect(small_spec(), 2, 0.7, -0.2);
  g.sentiment_prior = {{0.3, 0.2, 0.3}};
  const GenSpecFile back = gen_spec_from_json(gen_spec_to_json(g));
  EXPECT_FALSE(back.split);
  const auto a = generate(g);
  const auto b = generate(back.spec);
  ASSERT_EQ(a.corpus.reviews.size(), b.corpus.reviews.size());
  for (std::size_t d = 0; d < a.corpus.reviews.size(); ++d) {
    EXPECT_EQ(a.corpus.reviews[d].tokens, b.corpus.reviews[d].tokens);
    EXPECT_EQ(a.corpus.reviews[d].rating, b.corpus.reviews[d].rating);
  }
}

TEST(GenSpecJson, CriticalAspectsAndSplitAreApplied) {
  const GenSpecFile f = gen_spec_from_json(R"({"K_true": 2, "V": 20, "D": 40, "seed": 3,
      "critical_aspects": [{"aspect": 1, "preference": 0.6, "sentiment": -0.4}],
      "split": {"train_fraction": 0.75}})");
  ASSERT_TRUE(f.split);
  EXPECT_DOUBLE_EQ(f.split->train_fraction, 0.75);
  EXPECT_EQ(f.split->seed, 3u);
  const TrainedModel truth = truth_model(generate(f.spec));
  EXPECT_NEAR(aspect_preference(truth, 1), 0.6, 0.02);
  EXPECT_NEAR(aspect_sentiment(truth, 1), -0.4, 0.02);
}

TEST(GenSpecJson, MalformedIsASchemaError) {
  for (const char* text : {"[1,2]", R"({"V": "many"})", "not json"}) {
    try {
      gen_spec_from_json(text);
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kSchema) << text;
    }
  }
}
