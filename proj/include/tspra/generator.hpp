#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tspra/corpus.hpp"
#include "tspra/model_core.hpp"

namespace tspra {

struct GenSpec {
  std::size_t num_topics = 3;     // K_true
  std::size_t vocab_size = 50;    // V
  std::size_t num_authors = 10;   // X
  std::size_t num_reviews = 300;  // D
  std::size_t num_products = 20;
  double doc_length_mean = 40.0;  // Poisson mean
  std::size_t doc_length_min = 5;
  HyperParams hyper;
  std::uint64_t seed = 1;

  // Dirichlet parameters used when a table is sampled rather than planted.
  // sentiment_prior: empty -> (lambda, lambda, lambda); one entry -> shared
  // by all topics; num_topics entries -> one per topic.
  std::vector<std::array<double, kNumSentiments>> sentiment_prior;
  std::optional<std::array<double, kNumPreferences>> preference_prior;  // default (eta, eta)

  // Planted tables, laid out as in TrainedModel; empty -> sampled.
  std::vector<double> phi;  // K x V
  std::vector<double> pi;   // K x V x S
  std::vector<double> psi;  // K x X x U

  /// Throws Error(kInvalidArgument) for zero sizes, bad priors, or planted
  /// tables of the wrong shape or not normalized.
  void validate() const;
};

struct SyntheticCorpus {
  Corpus corpus;
  std::vector<double> phi;  // K x V ground truth
  std::vector<double> pi;   // K x V x S
  std::vector<double> psi;  // K x X x U
  Assignments assignments;  // topic ids index the planted pool
  std::vector<double> review_mean;  // r_bar per review
  std::vector<double> raw_rating;   // r_d before clamping
  HyperParams hyper;
};

/// Fills any unplanted table by sampling it from its prior. generate() on the
/// result draws the same corpus as on the input.
GenSpec materialize_tables(const GenSpec& spec);

SyntheticCorpus generate(const GenSpec& spec);

/// Plants topic `aspect` so that its average strong-preference probability is
/// preference_level and its aggregate sentiment is sentiment_level: every
/// author gets psi = (1 - p, p), and each word keeps its neutral mass while
/// the remaining mass is split (1 + s)/2 positive, (1 - s)/2 negative.
/// Throws Error(kInfeasible) when a level is out of range or the topic has no
/// non-neutral mass to split.
GenSpec plant_critical_aspect(const GenSpec& spec, std::size_t aspect, double preference_level,
                              double sentiment_level);

/// The generating tables as a model, with m_k counted from the true seating.
TrainedModel truth_model(const SyntheticCorpus& synth);

/// JSON form of GenSpec. Besides the GenSpec fields, a file may list
/// "critical_aspects": [{"aspect", "preference", "sentiment"}] applied in
/// order, and a "split" object with SplitOptions fields.
struct GenSpecFile {
  GenSpec spec;
  std::optional<SplitOptions> split;
};
GenSpecFile gen_spec_from_json(std::string_view text);
GenSpecFile load_gen_spec(const std::filesystem::path& path);
std::string gen_spec_to_json(const GenSpec& spec);

}  // namespace tspra
