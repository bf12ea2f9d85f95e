#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tspra/corpus.hpp"
#include "tspra/random.hpp"

namespace tspra {

inline constexpr std::size_t kNumSentiments = 3;   // S
inline constexpr std::size_t kNumPreferences = 2;  // U
inline constexpr std::size_t kNumLabelCells = kNumSentiments * kNumPreferences;

// Stored as (negative, neutral, positive) -> (0, 1, 2).
enum class Sentiment : std::int8_t { kNegative = -1, kNeutral = 0, kPositive = 1 };
// Stored as (weak, strong) -> (0, 1).
enum class Preference : std::uint8_t { kWeak = 0, kStrong = 1 };

constexpr std::size_t index_of(Sentiment s) { return static_cast<std::size_t>(static_cast<int>(s) + 1); }
constexpr std::size_t index_of(Preference u) { return static_cast<std::size_t>(u); }
constexpr Sentiment sentiment_at(std::size_t index) { return static_cast<Sentiment>(static_cast<int>(index) - 1); }
constexpr Preference preference_at(std::size_t index) { return static_cast<Preference>(index); }

/// Flat index of a (preference, sentiment) cell: u * S + s.
constexpr std::size_t label_cell(Preference u, Sentiment s) { return index_of(u) * kNumSentiments + index_of(s); }

struct HyperParams {
  double gamma = 1.5;   // top-level DP concentration
  double alpha = 1.0;   // per-review DP concentration
  double beta = 0.5;    // topic-word Dirichlet
  double eta = 0.5;     // preference Dirichlet
  double lambda = 0.5;  // sentiment Dirichlet
  double mu = 3.5;      // neutral rating
  double sigma2 = 0.08; // rating noise variance

  /// Throws Error(kInvalidArgument) unless all concentrations and sigma2 are
  /// positive and mu lies in [1, 5].
  void validate() const;

  bool operator==(const HyperParams&) const = default;
};

// --- rating rule ------------------------------------------------------------

/// Rating implied by a word's preference and sentiment:
/// strong/negative -> 1, weak/negative -> (1+mu)/2, strong/positive -> 5,
/// weak/positive -> (5+mu)/2, neutral -> mu.
double word_rating(Preference u, Sentiment s, double mu);

/// Mean of the non-neutral word ratings, or mu if every word is neutral.
double review_mean(std::span<const double> word_ratings, std::span<const Sentiment> sentiments, double mu);

/// Log of the unnormalized Gaussian rating factor: -(r_d - r_bar)^2 / (2 sigma2).
double rating_log_likelihood(double rating, double r_bar, double sigma2);

/// Per-review tally of non-neutral words by (preference, sentiment) cell.
/// Lets the sampler evaluate the review mean for a candidate label in O(1)
/// with integer bookkeeping.
struct PolarTally {
  // Index: (sentiment == positive) * 2 + preference.
  std::array<int, 4> counts{};

  static constexpr std::size_t slot(Preference u, Sentiment s) {
    return (s == Sentiment::kPositive ? 2u : 0u) + index_of(u);
  }
  void add(Preference u, Sentiment s, int delta) {
    if (s != Sentiment::kNeutral) counts[slot(u, s)] += delta;
  }
  /// Review mean with an optional extra word labelled (u, s).
  double mean(double mu) const;
  double mean_with(Preference u, Sentiment s, double mu) const;

  bool operator==(const PolarTally&) const = default;
};

// --- latent state -----------------------------------------------------------

using TopicId = std::int32_t;
inline constexpr TopicId kNoTopic = -1;
inline constexpr TopicId kNewTopic = -2;
inline constexpr std::uint32_t kNoTable = UINT32_MAX;
inline constexpr std::uint32_t kNewTable = UINT32_MAX - 1;

struct DocAssignments {
  std::vector<std::uint32_t> table;    // t_di per word; kNoTable while detached
  std::vector<TopicId> table_topic;    // k_dt per table slot; kNoTopic for free slots
  std::vector<Sentiment> sentiment;    // s_di
  std::vector<Preference> preference;  // u_di
  std::vector<double> word_rating;     // r_di, cached from (u_di, s_di)
};

struct Assignments {
  std::vector<DocAssignments> docs;

  TopicId topic_of(std::size_t d, std::size_t i) const {
    return docs[d].table_topic[docs[d].table[i]];
  }
};

/// Count statistics of the franchise. Topic ids are stable slots; a slot with
/// zero tables is dead and all of its rows are zero.
struct CountTables {
  std::size_t vocab_size = 0;
  std::size_t num_authors = 0;

  std::vector<std::vector<int>> table_customers;  // n_dt, [d][t]
  std::vector<int> topic_tables;                  // m_k
  int total_tables = 0;                           // m_..
  std::vector<int> topic_words;                   // l_k.
  std::vector<std::vector<int>> topic_word;       // l_kw, [k][w]
  std::vector<std::vector<int>> topic_word_sentiment;  // l_kws, [k][w * S + s]
  std::vector<std::vector<int>> topic_author;          // c_kx., [k][x]
  std::vector<std::vector<int>> topic_author_preference;  // c_kxu, [k][x * U + u]
  std::size_t live_topics = 0;                          // K

  std::size_t topic_capacity() const { return topic_tables.size(); }
  bool topic_live(TopicId k) const {
    return k >= 0 && static_cast<std::size_t>(k) < topic_tables.size() && topic_tables[k] > 0;
  }

  /// Logical equality: dead topic slots and unused table slots compare equal
  /// to absent ones.
  bool operator==(const CountTables& other) const;
};

/// Rebuilds every count from the assignments. Throws Error(kSchema) on a word
/// whose table slot or table topic is missing.
CountTables recount(const Assignments& assign, const Corpus& corpus);

/// Verifies the marginal identities (sum_w l_kw = l_k., sum_s l_kws = l_kw,
/// sum_u c_kxu = c_kx., sum_t n_dt = |d|, sum_k m_k = m_..) and the live-slot
/// conventions. Returns a description of the first violation, if any.
std::optional<std::string> check_marginals(const CountTables& counts, const Corpus& corpus);

struct LogScore {
  double seating = 0.0;     // CRF prior over tables and table topics
  double words = 0.0;       // collapsed topic-word likelihood
  double sentiments = 0.0;  // collapsed sentiment likelihood
  double preferences = 0.0; // collapsed preference likelihood
  double ratings = 0.0;     // unnormalized Gaussian rating factors
  double total() const { return seating + words + sentiments + preferences + ratings; }
};

/// Latent state of one Gibbs chain. The corpus must outlive the state.
class ModelState {
 public:
  /// Creates an empty state: every word detached, no tables, no topics.
  ModelState(const Corpus& corpus, const HyperParams& hyper, std::uint64_t seed);

  const Corpus& corpus() const { return *corpus_; }
  const HyperParams& hyper() const { return hyper_; }
  const Assignments& assignments() const { return assign_; }
  const CountTables& counts() const { return counts_; }
  const PolarTally& tally(std::size_t d) const { return tallies_[d]; }
  Rng& rng() { return rng_; }

  /// Live topic ids in ascending order.
  const std::vector<TopicId>& live_topics() const { return live_; }

  // Bookkeeping primitives used by the sampler. Each keeps counts exactly in
  // step with the assignments.

  /// Removes word (d, i) from its table and all topic counts. An emptied
  /// table is freed; a topic left without tables dies.
  void detach_word(std::size_t d, std::size_t i);
  /// Seats a detached word. table may be kNewTable, in which case topic
  /// (possibly kNewTopic) is served at the fresh table; otherwise topic is
  /// ignored. Returns the table slot used.
  std::uint32_t attach_word(std::size_t d, std::size_t i, std::uint32_t table, TopicId topic, Sentiment s,
                            Preference u);

  /// Removes every word at table t from the topic counts and the table from
  /// its topic. Seating (n_dt) is untouched; the table's topic becomes
  /// kNoTopic until attach_table.
  void detach_table(std::size_t d, std::uint32_t t);
  /// Serves topic (possibly kNewTopic) at a detached table. Returns the topic id.
  TopicId attach_table(std::size_t d, std::uint32_t t, TopicId topic);

  /// Removes word (d, i)'s sentiment/preference contribution only.
  void detach_labels(std::size_t d, std::size_t i);
  void attach_labels(std::size_t d, std::size_t i, Sentiment s, Preference u);

  /// Words seated at table t of review d, in position order.
  std::vector<std::size_t> words_at(std::size_t d, std::uint32_t t) const;

 private:
  TopicId allocate_topic();
  void release_topic_if_dead(TopicId k);
  void add_word_to_topic(std::size_t d, std::size_t i, TopicId k, int delta);
  void add_labels_to_topic(std::size_t d, std::size_t i, TopicId k, int delta);

  const Corpus* corpus_;
  HyperParams hyper_;
  Assignments assign_;
  CountTables counts_;
  std::vector<PolarTally> tallies_;
  std::vector<TopicId> live_;
  std::vector<TopicId> free_topics_;
  Rng rng_;
};

LogScore log_score(const ModelState& state);

// --- trained model ----------------------------------------------------------

struct TrainedModel {
  HyperParams hyper;
  Vocabulary vocabulary;
  std::vector<std::string> author_ids;
  std::size_t num_topics = 0;
  std::vector<double> phi;  // K x V
  std::vector<double> pi;   // K x V x S
  std::vector<double> psi;  // K x X x U
  std::vector<int> topic_tables;  // frozen m_k
  int total_tables = 0;           // frozen m_..
  double train_mean_rating = 0.0;

  std::size_t vocab_size() const { return vocabulary.size(); }
  std::size_t num_authors() const { return author_ids.size(); }

  double phi_at(std::size_t k, std::size_t w) const { return phi[k * vocab_size() + w]; }
  double pi_at(std::size_t k, std::size_t w, Sentiment s) const {
    return pi[(k * vocab_size() + w) * kNumSentiments + index_of(s)];
  }
  double psi_at(std::size_t k, std::size_t x, Preference u) const {
    return psi[(k * num_authors() + x) * kNumPreferences + index_of(u)];
  }
  std::optional<std::size_t> find_author(std::string_view id) const;

  bool operator==(const TrainedModel&) const = default;
};

/// Smoothed point estimates from the current counts. Live topics are relabelled
/// densely in ascending id order.
TrainedModel estimate_parameters(const ModelState& state);

/// Writes a versioned JSON model. Doubles round-trip bit-exactly. A sweep
/// number marks the file as a checkpoint.
void save_model(const std::filesystem::path& path, const TrainedModel& model,
                std::optional<std::size_t> sweep = std::nullopt);
TrainedModel load_model(const std::filesystem::path& path);
std::string model_to_json(const TrainedModel& model, std::optional<std::size_t> sweep = std::nullopt);
TrainedModel model_from_json(std::string_view text);

}  // namespace tspra
