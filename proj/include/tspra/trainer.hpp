#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "tspra/corpus.hpp"
#include "tspra/model_core.hpp"

namespace tspra {

struct TrainConfig {
  std::size_t sweeps = 1000;
  std::size_t burn_in = 500;
  std::uint64_t seed = 1;
  std::size_t checkpoint_every = 100;  // 0 disables checkpoints
  bool debug_invariants = false;

  /// sweeps > burn_in, except that sweeps == burn_in == 0 is accepted as a
  /// smoke run that returns the initial state.
  void validate() const;
};

struct SweepStats {
  std::size_t sweep = 0;  // 1-based; 0 is the initial state
  bool burn_in = false;
  std::size_t topics = 0;
  int tables = 0;
  LogScore score;
};

struct TrainHooks {
  std::function<void(const SweepStats&)> on_sweep;
  std::function<void(std::size_t sweep, const TrainedModel&)> on_checkpoint;
};

// --- conditionals -----------------------------------------------------------
// Normalized full conditionals, exposed for verification. Each requires the
// corresponding detach_* call to have been made on the state.

struct SeatingOption {
  std::uint32_t table = kNewTable;  // existing slot or kNewTable
  TopicId topic = kNewTopic;        // topic served; kNewTopic for an unseen one
  Sentiment sentiment = Sentiment::kNeutral;
  Preference preference = Preference::kWeak;
  double probability = 0.0;
};

/// Joint conditional of (table, sentiment, preference) for detached word
/// (d, i). New-table options are split by the topic the table would serve.
std::vector<SeatingOption> seating_conditional(const ModelState& state, std::size_t d, std::size_t i);

/// Conditional of the topic served at detached table t of review d, with the
/// words' current sentiments/preferences held fixed. The last entry is
/// kNewTopic.
std::vector<std::pair<TopicId, double>> table_topic_conditional(const ModelState& state, std::size_t d,
                                                                std::uint32_t t);

/// Conditional over the six (preference, sentiment) cells of word (d, i)
/// after detach_labels, indexed by label_cell(u, s).
std::array<double, kNumLabelCells> label_conditional(const ModelState& state, std::size_t d, std::size_t i);

// --- sampler steps ----------------------------------------------------------

/// Seats every word sequentially given the words before it, with sentiment
/// and preference drawn uniformly.
ModelState init_state(const Corpus& corpus, const HyperParams& hyper, std::uint64_t seed);

/// Resamples word (d, i)'s table jointly with its sentiment and preference.
void resample_table(ModelState& state, std::size_t d, std::size_t i);

/// Resamples the topic served at live table t of review d.
void resample_table_topic(ModelState& state, std::size_t d, std::uint32_t t);

/// Resamples word (d, i)'s (sentiment, preference) pair.
void resample_sentiment_preference(ModelState& state, std::size_t d, std::size_t i);

/// One pass: per review, tables for every word, then topics for every live
/// table, then labels for every word.
void sweep(ModelState& state);

/// Throws Error(kSchema) if counts differ from a full recount or a marginal
/// identity fails.
void verify_invariants(const ModelState& state);

TrainedModel train(const Corpus& corpus, const HyperParams& hyper, const TrainConfig& config,
                   const TrainHooks& hooks = {});

}  // namespace tspra
