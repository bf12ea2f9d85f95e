#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tspra/corpus.hpp"
#include "tspra/model_core.hpp"

namespace tspra {

struct PredictConfig {
  std::size_t sweeps = 200;
  std::size_t burn_in = 100;
  std::uint64_t seed = 1;
  bool average_over_sweeps = true;  // false: use the final sweep's review mean
  bool keep_trace = false;

  /// Requires sweeps > burn_in.
  void validate() const;
};

struct Prediction {
  std::string review_id;
  std::optional<double> true_rating;
  double predicted_rating = 0.0;  // clamped to [1, 5]
  bool oov = false;               // no token was in the model vocabulary
  std::vector<double> trace;      // post-burn-in review means, if kept
  std::string error;              // non-empty if the review could not be scored
};

/// A review expressed in the model's word and author ids.
struct PredictionInput {
  std::string review_id;
  std::optional<double> true_rating;
  std::vector<WordId> tokens;         // model vocabulary ids; OOV tokens dropped
  std::optional<std::size_t> author;  // none for an author the model never saw
  std::size_t dropped_tokens = 0;
};

/// Maps review d of corpus onto the model's vocabulary and author index by
/// string identity.
PredictionInput align_review(const TrainedModel& model, const Corpus& corpus, std::size_t d);

/// Samples the review's table structure and labels with the model frozen,
/// using config.seed directly as the review's stream.
Prediction predict(const TrainedModel& model, const PredictionInput& review, const PredictConfig& config);

/// Stream seed used for a review inside predict_batch. Depends only on the
/// batch seed and the review id, never on position.
std::uint64_t review_stream_seed(std::uint64_t seed, std::string_view review_id);

/// One prediction per review, in corpus order. Per-review failures are stored
/// in Prediction::error. jobs >= 1 worker threads.
std::vector<Prediction> predict_batch(const TrainedModel& model, const Corpus& corpus, const PredictConfig& config,
                                      std::size_t jobs = 1);

/// Tab-separated: review_id, true_rating, predicted_rating, oov. Reviews with
/// an error are omitted.
void write_predictions(const std::filesystem::path& path, const std::vector<Prediction>& predictions);
std::vector<Prediction> read_predictions(const std::filesystem::path& path);

}  // namespace tspra
