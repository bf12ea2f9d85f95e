#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "tspra/model_core.hpp"

namespace tspra {

/// Aggregate polarity of word w over all topics, ignoring neutral mass:
/// sum_k(pi+ - pi-) / sum_k(pi+ + pi-). Returns 0 when the denominator is 0.
double word_polarity(const TrainedModel& model, WordId w);

/// Mean probability of strong preference for topic k over all authors.
double aspect_preference(const TrainedModel& model, std::size_t k);

/// Aggregate sentiment of topic k over the whole vocabulary:
/// sum_w(pi+ - pi-) / sum_w(pi+ + pi-). Returns 0 when the denominator is 0.
double aspect_sentiment(const TrainedModel& model, std::size_t k);

/// preference >= pref_floor, and sentiment <= 0 or preference / sentiment
/// exceeds ratio_threshold.
bool is_critical(double preference, double sentiment, double pref_floor = 0.3, double ratio_threshold = 2.0);

using WeightedWord = std::pair<WordId, double>;

/// The n words with the largest phi_kw, descending; ties by word id.
std::vector<WeightedWord> top_words(const TrainedModel& model, std::size_t k, std::size_t n);

struct AspectSummary {
  std::size_t topic = 0;
  double preference = 0.0;
  double sentiment = 0.0;
  bool critical = false;
  std::vector<WeightedWord> top_words;
};

/// One summary per topic, sorted by preference descending (ties by topic id).
std::vector<AspectSummary> critical_aspects(const TrainedModel& model, double pref_floor = 0.3,
                                            double ratio_threshold = 2.0, std::size_t top_n = 10);

/// Polarity of every vocabulary word, indexed by word id.
std::vector<double> polarity_table(const TrainedModel& model);

struct PolarityExtremes {
  std::vector<WeightedWord> positive;  // polarity descending
  std::vector<WeightedWord> negative;  // polarity ascending
};
/// Ties are broken by word id in both lists.
PolarityExtremes polarity_extremes(const TrainedModel& model, std::size_t n);

struct Histogram {
  std::vector<double> edges;  // bins + 1 edges spanning [-1, 1]
  std::vector<std::size_t> counts;
};
Histogram polarity_histogram(const TrainedModel& model, std::size_t bins = 20);

struct AnalysisOptions {
  double pref_floor = 0.3;
  double ratio_threshold = 2.0;
  std::size_t top_n = 20;
  std::size_t histogram_bins = 20;
};

/// Writes polarity.tsv, polarity_extremes.tsv, aspects.tsv, top_words.tsv and
/// polarity_histogram.tsv into dir, creating it if needed. Returns the paths
/// written.
std::vector<std::filesystem::path> write_analysis_report(const std::filesystem::path& dir, const TrainedModel& model,
                                                         const AnalysisOptions& options = {});

}  // namespace tspra
