#include "tspra/trainer.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "tspra/common.hpp"

namespace tspra {

namespace {

constexpr std::size_t S = kNumSentiments;
constexpr std::size_t U = kNumPreferences;
constexpr std::size_t kCells = kNumLabelCells;

using CellArray = std::array<double, kCells>;

// Gaussian rating factor for each candidate (u, s) of a detached word,
// max-shifted so the largest cell is exactly 1.
CellArray rating_factors(const ModelState& state, std::size_t d) {
  const HyperParams& h = state.hyper();
  const PolarTally& tally = state.tally(d);
  const double rating = state.corpus().reviews[d].rating;
  CellArray log_factor{};
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t u = 0; u < U; ++u) {
    for (std::size_t s = 0; s < S; ++s) {
      const double r_bar = tally.mean_with(preference_at(u), sentiment_at(s), h.mu);
      const double lg = rating_log_likelihood(rating, r_bar, h.sigma2);
      log_factor[u * S + s] = lg;
      max_log = std::max(max_log, lg);
    }
  }
  CellArray factor{};
  for (std::size_t c = 0; c < kCells; ++c) factor[c] = std::exp(log_factor[c] - max_log);
  return factor;
}

// Smoothed preference and sentiment ratios of topic k for word w / author x,
// computed from whatever counts are currently attached.
void label_ratios(const CountTables& c, const HyperParams& h, std::size_t k, WordId w, std::size_t x,
                  std::array<double, U>& pref, std::array<double, S>& senti) {
  const int* by_pref = &c.topic_author_preference[k][x * U];
  const double pref_norm = by_pref[0] + by_pref[1] + U * h.eta;
  for (std::size_t u = 0; u < U; ++u) pref[u] = (by_pref[u] + h.eta) / pref_norm;
  const int* by_senti = &c.topic_word_sentiment[k][w * S];
  const double senti_norm = by_senti[0] + by_senti[1] + by_senti[2] + S * h.lambda;
  for (std::size_t s = 0; s < S; ++s) senti[s] = (by_senti[s] + h.lambda) / senti_norm;
}

struct SeatingWork {
  std::vector<CellArray> cells;     // per topic slot
  std::vector<double> mass;         // per topic slot: sum of cells
  CellArray new_cells{};
  double new_mass = 0.0;
  std::vector<double> table_weights;  // per table slot, then one entry for a new table
  std::vector<double> topic_weights;  // per live topic (in live order), then the new topic
};

// Fills work with the unnormalized seating weights of detached word (d, i).
// If fixed_cell is set, only that (u, s) cell is considered and the rating
// factor is dropped (it is constant across options).
void compute_seating(const ModelState& state, std::size_t d, std::size_t i, SeatingWork& work,
                     const std::size_t* fixed_cell = nullptr) {
  const HyperParams& h = state.hyper();
  const CountTables& c = state.counts();
  const Review& review = state.corpus().reviews[d];
  const WordId w = review.tokens[i];
  const std::size_t x = review.author;
  const double V = static_cast<double>(c.vocab_size);

  CellArray factor{};
  if (fixed_cell) {
    factor[*fixed_cell] = 1.0;
  } else {
    factor = rating_factors(state, d);
  }

  work.cells.resize(c.topic_capacity());
  work.mass.resize(c.topic_capacity());
  double old_topic_mass = 0.0;
  std::array<double, U> pref{};
  std::array<double, S> senti{};
  for (TopicId k : state.live_topics()) {
    const double word_ratio = (c.topic_word[k][w] + h.beta) / (c.topic_words[k] + V * h.beta);
    label_ratios(c, h, static_cast<std::size_t>(k), w, x, pref, senti);
    CellArray& cell = work.cells[k];
    double mass = 0.0;
    for (std::size_t u = 0; u < U; ++u) {
      for (std::size_t s = 0; s < S; ++s) {
        const double v = word_ratio * pref[u] * senti[s] * factor[u * S + s];
        cell[u * S + s] = v;
        mass += v;
      }
    }
    work.mass[k] = mass;
    old_topic_mass += c.topic_tables[k] * mass;
  }
  work.new_mass = 0.0;
  for (std::size_t cell = 0; cell < kCells; ++cell) {
    work.new_cells[cell] = factor[cell] / (V * U * S);
    work.new_mass += work.new_cells[cell];
  }

  const auto& doc = state.assignments().docs[d];
  const auto& customers = c.table_customers[d];
  work.table_weights.assign(doc.table_topic.size() + 1, 0.0);
  for (std::size_t t = 0; t < doc.table_topic.size(); ++t) {
    const TopicId k = doc.table_topic[t];
    if (k >= 0) work.table_weights[t] = customers[t] * work.mass[k];
  }
  work.table_weights.back() =
      h.alpha * (old_topic_mass + h.gamma * work.new_mass) / (c.total_tables + h.gamma);

  work.topic_weights.clear();
  for (TopicId k : state.live_topics()) work.topic_weights.push_back(c.topic_tables[k] * work.mass[k]);
  work.topic_weights.push_back(h.gamma * work.new_mass);
}

SeatingWork& seating_scratch() {
  thread_local SeatingWork work;
  return work;
}

// Log-weights of every candidate topic for detached table t; the last entry
// is the new topic. Each candidate is scored by the exact predictive
// probability of the table's block of (word, sentiment, preference) triples,
// adding the block one word at a time.
void compute_table_topic(const ModelState& state, std::size_t d, std::uint32_t t, std::vector<double>& log_weights) {
  const HyperParams& h = state.hyper();
  const CountTables& c = state.counts();
  const Review& review = state.corpus().reviews[d];
  const auto& doc = state.assignments().docs[d];
  const std::size_t x = review.author;
  const double V = static_cast<double>(c.vocab_size);

  struct BlockWord {
    WordId w;
    std::size_t s;
    std::size_t u;
    int same_word;       // earlier block words with the same type
    int same_word_senti; // ... and the same sentiment
    int same_pref;       // earlier block words with the same preference
  };
  thread_local std::vector<BlockWord> block;
  block.clear();
  for (std::size_t i = 0; i < doc.table.size(); ++i) {
    if (doc.table[i] != t) continue;
    BlockWord b{review.tokens[i], index_of(doc.sentiment[i]), index_of(doc.preference[i]), 0, 0, 0};
    for (const BlockWord& prev : block) {
      if (prev.w == b.w) {
        ++b.same_word;
        if (prev.s == b.s) ++b.same_word_senti;
      }
      if (prev.u == b.u) ++b.same_pref;
    }
    block.push_back(b);
  }

  auto block_log_predictive = [&](const int* topic_word, int topic_words, const int* word_senti,
                                  const int* author_pref, int author_total) {
    double lp = 0.0;
    for (std::size_t j = 0; j < block.size(); ++j) {
      const BlockWord& b = block[j];
      const int lw = topic_word ? topic_word[b.w] : 0;
      const int* ws = word_senti ? word_senti + b.w * S : nullptr;
      const int lws = ws ? ws[b.s] : 0;
      const int lw_total = ws ? ws[0] + ws[1] + ws[2] : 0;
      const int cu = author_pref ? author_pref[b.u] : 0;
      const double jd = static_cast<double>(j);
      lp += std::log((lw + h.beta + b.same_word) / (topic_words + V * h.beta + jd));
      lp += std::log((lws + h.lambda + b.same_word_senti) / (lw_total + S * h.lambda + b.same_word));
      lp += std::log((cu + h.eta + b.same_pref) / (author_total + U * h.eta + jd));
    }
    return lp;
  };

  log_weights.clear();
  for (TopicId k : state.live_topics()) {
    const double lp = block_log_predictive(c.topic_word[k].data(), c.topic_words[k],
                                           c.topic_word_sentiment[k].data(),
                                           &c.topic_author_preference[k][x * U], c.topic_author[k][x]);
    log_weights.push_back(std::log(static_cast<double>(c.topic_tables[k])) + lp);
  }
  log_weights.push_back(std::log(h.gamma) + block_log_predictive(nullptr, 0, nullptr, nullptr, 0));
}

CellArray compute_labels(const ModelState& state, std::size_t d, std::size_t i) {
  const HyperParams& h = state.hyper();
  const CountTables& c = state.counts();
  const Review& review = state.corpus().reviews[d];
  const TopicId k = state.assignments().topic_of(d, i);
  const CellArray factor = rating_factors(state, d);
  std::array<double, U> pref{};
  std::array<double, S> senti{};
  label_ratios(c, h, static_cast<std::size_t>(k), review.tokens[i], review.author, pref, senti);
  CellArray weights{};
  for (std::size_t u = 0; u < U; ++u) {
    for (std::size_t s = 0; s < S; ++s) weights[u * S + s] = pref[u] * senti[s] * factor[u * S + s];
  }
  return weights;
}

std::pair<Sentiment, Preference> cell_labels(std::size_t cell) {
  return {sentiment_at(cell % S), preference_at(cell / S)};
}

}  // namespace

void TrainConfig::validate() const {
  if (sweeps == 0 && burn_in == 0) return;
  if (!(sweeps > burn_in)) throw Error(ErrorKind::kInvalidArgument, "sweeps must exceed burn_in");
}

// --- conditionals -----------------------------------------------------------

std::vector<SeatingOption> seating_conditional(const ModelState& state, std::size_t d, std::size_t i) {
  SeatingWork work;
  compute_seating(state, d, i, work);
  const auto& doc = state.assignments().docs[d];
  const CountTables& c = state.counts();
  const HyperParams& h = state.hyper();
  double total = 0.0;
  for (double v : work.table_weights) total += v;

  std::vector<SeatingOption> options;
  for (std::size_t t = 0; t < doc.table_topic.size(); ++t) {
    const TopicId k = doc.table_topic[t];
    if (k < 0) continue;
    for (std::size_t cell = 0; cell < kCells; ++cell) {
      auto [s, u] = cell_labels(cell);
      options.push_back({static_cast<std::uint32_t>(t), k, s, u,
                         c.table_customers[d][t] * work.cells[k][cell] / total});
    }
  }
  const double new_table = h.alpha / (c.total_tables + h.gamma);
  for (TopicId k : state.live_topics()) {
    for (std::size_t cell = 0; cell < kCells; ++cell) {
      auto [s, u] = cell_labels(cell);
      options.push_back({kNewTable, k, s, u, new_table * c.topic_tables[k] * work.cells[k][cell] / total});
    }
  }
  for (std::size_t cell = 0; cell < kCells; ++cell) {
    auto [s, u] = cell_labels(cell);
    options.push_back({kNewTable, kNewTopic, s, u, new_table * h.gamma * work.new_cells[cell] / total});
  }
  return options;
}

std::vector<std::pair<TopicId, double>> table_topic_conditional(const ModelState& state, std::size_t d,
                                                                std::uint32_t t) {
  std::vector<double> log_weights;
  compute_table_topic(state, d, t, log_weights);
  const double max_log = *std::max_element(log_weights.begin(), log_weights.end());
  double total = 0.0;
  for (double& lw : log_weights) total += (lw = std::exp(lw - max_log));
  std::vector<std::pair<TopicId, double>> out;
  const auto& live = state.live_topics();
  for (std::size_t j = 0; j < live.size(); ++j) out.emplace_back(live[j], log_weights[j] / total);
  out.emplace_back(kNewTopic, log_weights.back() / total);
  return out;
}

std::array<double, kNumLabelCells> label_conditional(const ModelState& state, std::size_t d, std::size_t i) {
  CellArray weights = compute_labels(state, d, i);
  double total = 0.0;
  for (double v : weights) total += v;
  for (double& v : weights) v /= total;
  return weights;
}

// --- sampler steps ----------------------------------------------------------

ModelState init_state(const Corpus& corpus, const HyperParams& hyper, std::uint64_t seed) {
  if (corpus.reviews.empty()) throw Error(ErrorKind::kInvalidArgument, "init_state: empty corpus");
  ModelState state(corpus, hyper, seed);
  SeatingWork& work = seating_scratch();
  Rng& rng = state.rng();
  for (std::size_t d = 0; d < corpus.reviews.size(); ++d) {
    for (std::size_t i = 0; i < corpus.reviews[d].tokens.size(); ++i) {
      const Sentiment s = sentiment_at(rng.below(S));
      const Preference u = preference_at(rng.below(U));
      const std::size_t cell = label_cell(u, s);
      compute_seating(state, d, i, work, &cell);
      const std::size_t choice = rng.categorical(work.table_weights);
      if (choice + 1 < work.table_weights.size()) {
        state.attach_word(d, i, static_cast<std::uint32_t>(choice), kNoTopic, s, u);
        continue;
      }
      const std::size_t topic_choice = rng.categorical(work.topic_weights);
      const auto& live = state.live_topics();
      const TopicId k = topic_choice < live.size() ? live[topic_choice] : kNewTopic;
      state.attach_word(d, i, kNewTable, k, s, u);
    }
  }
  return state;
}

void resample_table(ModelState& state, std::size_t d, std::size_t i) {
  state.detach_word(d, i);
  SeatingWork& work = seating_scratch();
  compute_seating(state, d, i, work);
  Rng& rng = state.rng();
  const std::size_t choice = rng.categorical(work.table_weights);
  if (choice + 1 < work.table_weights.size()) {
    const TopicId k = state.assignments().docs[d].table_topic[choice];
    auto [s, u] = cell_labels(rng.categorical(work.cells[k]));
    state.attach_word(d, i, static_cast<std::uint32_t>(choice), kNoTopic, s, u);
    return;
  }
  const std::size_t topic_choice = rng.categorical(work.topic_weights);
  const auto& live = state.live_topics();
  if (topic_choice < live.size()) {
    const TopicId k = live[topic_choice];
    auto [s, u] = cell_labels(rng.categorical(work.cells[k]));
    state.attach_word(d, i, kNewTable, k, s, u);
  } else {
    auto [s, u] = cell_labels(rng.categorical(work.new_cells));
    state.attach_word(d, i, kNewTable, kNewTopic, s, u);
  }
}

void resample_table_topic(ModelState& state, std::size_t d, std::uint32_t t) {
  state.detach_table(d, t);
  thread_local std::vector<double> log_weights;
  thread_local std::vector<double> scratch;
  compute_table_topic(state, d, t, log_weights);
  scratch.resize(log_weights.size());
  const std::size_t choice = state.rng().categorical_log(log_weights, scratch);
  const auto& live = state.live_topics();
  state.attach_table(d, t, choice < live.size() ? live[choice] : kNewTopic);
}

void resample_sentiment_preference(ModelState& state, std::size_t d, std::size_t i) {
  state.detach_labels(d, i);
  const CellArray weights = compute_labels(state, d, i);
  auto [s, u] = cell_labels(state.rng().categorical(weights));
  state.attach_labels(d, i, s, u);
}

void sweep(ModelState& state) {
  const Corpus& corpus = state.corpus();
  std::vector<std::uint32_t> live_tables;
  for (std::size_t d = 0; d < corpus.reviews.size(); ++d) {
    const std::size_t n = corpus.reviews[d].tokens.size();
    for (std::size_t i = 0; i < n; ++i) resample_table(state, d, i);
    live_tables.clear();
    const auto& topics = state.assignments().docs[d].table_topic;
    for (std::size_t t = 0; t < topics.size(); ++t) {
      if (topics[t] >= 0) live_tables.push_back(static_cast<std::uint32_t>(t));
    }
    for (std::uint32_t t : live_tables) resample_table_topic(state, d, t);
    for (std::size_t i = 0; i < n; ++i) resample_sentiment_preference(state, d, i);
  }
}

void verify_invariants(const ModelState& state) {
  const CountTables fresh = recount(state.assignments(), state.corpus());
  if (!(fresh == state.counts())) throw Error(ErrorKind::kSchema, "count tables drifted from the assignments");
  if (auto why = check_marginals(state.counts(), state.corpus())) throw Error(ErrorKind::kSchema, *why);
  const HyperParams& h = state.hyper();
  for (std::size_t d = 0; d < state.corpus().reviews.size(); ++d) {
    const auto& doc = state.assignments().docs[d];
    PolarTally tally;
    for (std::size_t i = 0; i < doc.table.size(); ++i) {
      if (doc.word_rating[i] != word_rating(doc.preference[i], doc.sentiment[i], h.mu)) {
        throw Error(ErrorKind::kSchema, "cached word rating out of date");
      }
      tally.add(doc.preference[i], doc.sentiment[i], 1);
    }
    if (!(tally == state.tally(d))) throw Error(ErrorKind::kSchema, "review rating tally out of date");
  }
}

TrainedModel train(const Corpus& corpus, const HyperParams& hyper, const TrainConfig& config,
                   const TrainHooks& hooks) {
  config.validate();
  hyper.validate();
  ModelState state = init_state(corpus, hyper, config.seed);
  if (config.debug_invariants) verify_invariants(state);
  for (std::size_t it = 1; it <= config.sweeps; ++it) {
    sweep(state);
    if (config.debug_invariants) verify_invariants(state);
    if (hooks.on_sweep) {
      hooks.on_sweep({it, it <= config.burn_in, state.counts().live_topics, state.counts().total_tables,
                      log_score(state)});
    }
    if (hooks.on_checkpoint && config.checkpoint_every > 0 && it % config.checkpoint_every == 0) {
      hooks.on_checkpoint(it, estimate_parameters(state));
    }
  }
  return estimate_parameters(state);
}

}  // namespace tspra
