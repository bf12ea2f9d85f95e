#include "tspra/predictor.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "tspra/common.hpp"
#include "tspra/random.hpp"

namespace tspra {

namespace {

constexpr std::size_t S = kNumSentiments;
constexpr std::size_t U = kNumPreferences;

// Per-review sampler over a frozen model. Topic id K stands for any topic
// the model has not seen; its word, sentiment and preference distributions
// are uniform.
class FrozenSampler {
 public:
  FrozenSampler(const TrainedModel& model, const PredictionInput& review, std::uint64_t seed)
      : model_(model), review_(review), rng_(seed), K_(model.num_topics) {
    const std::size_t n = review.tokens.size();
    table_.assign(n, 0);
    sentiment_.assign(n, 1);
    preference_.assign(n, 0);
    uniform_psi_ = 1.0 / U;
    new_word_ = 1.0 / static_cast<double>(model.vocab_size());
  }

  void initialize() {
    for (std::size_t i = 0; i < review_.tokens.size(); ++i) seat(i);
  }

  void sweep() {
    const std::size_t n = review_.tokens.size();
    for (std::size_t i = 0; i < n; ++i) {
      unseat(i);
      seat(i);
    }
    for (std::size_t t = 0; t < table_topic_.size(); ++t) {
      if (customers_[t] > 0) resample_table_topic(t);
    }
    for (std::size_t i = 0; i < n; ++i) resample_labels(i, table_topic_[table_[i]]);
  }

  double review_mean() const {
    PolarTally tally;
    for (std::size_t i = 0; i < table_.size(); ++i) {
      tally.add(preference_at(preference_[i]), sentiment_at(sentiment_[i]), 1);
    }
    return tally.mean(model_.hyper.mu);
  }

 private:
  double phi(std::size_t k, WordId w) const { return k == K_ ? new_word_ : model_.phi_at(k, w); }
  double psi(std::size_t k, std::size_t u) const {
    if (k == K_ || !review_.author) return uniform_psi_;
    return model_.psi_at(k, *review_.author, preference_at(u));
  }
  double pi(std::size_t k, WordId w, std::size_t s) const {
    return k == K_ ? 1.0 / S : model_.pi_at(k, w, sentiment_at(s));
  }

  void unseat(std::size_t i) {
    const std::size_t t = table_[i];
    --customers_[t];
  }

  // Chooses a table for word i with its labels marginalized out, then draws
  // the labels given the table's topic.
  void seat(std::size_t i) {
    const WordId w = review_.tokens[i];
    const HyperParams& h = model_.hyper;
    weights_.clear();
    for (std::size_t t = 0; t < table_topic_.size(); ++t) {
      weights_.push_back(customers_[t] > 0 ? customers_[t] * phi(table_topic_[t], w) : 0.0);
    }
    topic_weights_.resize(K_ + 1);
    double old_mass = 0.0;
    for (std::size_t k = 0; k < K_; ++k) {
      topic_weights_[k] = model_.topic_tables[k] * model_.phi_at(k, w);
      old_mass += topic_weights_[k];
    }
    topic_weights_[K_] = h.gamma * new_word_;
    weights_.push_back(h.alpha * (old_mass + topic_weights_[K_]) / (model_.total_tables + h.gamma));

    std::size_t t = rng_.categorical(weights_);
    if (t + 1 == weights_.size()) {
      const std::size_t k = rng_.categorical(topic_weights_);
      t = open_table(k);
    }
    table_[i] = static_cast<std::uint32_t>(t);
    ++customers_[t];
    resample_labels(i, table_topic_[t]);
  }

  std::size_t open_table(std::size_t k) {
    for (std::size_t t = 0; t < customers_.size(); ++t) {
      if (customers_[t] == 0) {
        table_topic_[t] = k;
        return t;
      }
    }
    customers_.push_back(0);
    table_topic_.push_back(k);
    return customers_.size() - 1;
  }

  void resample_table_topic(std::size_t t) {
    const HyperParams& h = model_.hyper;
    log_weights_.assign(K_ + 1, 0.0);
    for (std::size_t k = 0; k < K_; ++k) log_weights_[k] = std::log(static_cast<double>(model_.topic_tables[k]));
    log_weights_[K_] = std::log(h.gamma);
    for (std::size_t i = 0; i < table_.size(); ++i) {
      if (table_[i] != t) continue;
      const WordId w = review_.tokens[i];
      for (std::size_t k = 0; k <= K_; ++k) {
        log_weights_[k] += std::log(phi(k, w) * psi(k, preference_[i]) * pi(k, w, sentiment_[i]));
      }
    }
    scratch_.resize(log_weights_.size());
    table_topic_[t] = rng_.categorical_log(log_weights_, scratch_);
  }

  void resample_labels(std::size_t i, std::size_t k) {
    const WordId w = review_.tokens[i];
    std::array<double, kNumLabelCells> cells{};
    for (std::size_t u = 0; u < U; ++u) {
      for (std::size_t s = 0; s < S; ++s) cells[u * S + s] = psi(k, u) * pi(k, w, s);
    }
    const std::size_t cell = rng_.categorical(cells);
    preference_[i] = cell / S;
    sentiment_[i] = cell % S;
  }

  const TrainedModel& model_;
  const PredictionInput& review_;
  Rng rng_;
  std::size_t K_;
  double uniform_psi_ = 0.5;
  double new_word_ = 0.0;

  std::vector<std::uint32_t> table_;
  std::vector<std::size_t> sentiment_;   // index form
  std::vector<std::size_t> preference_;  // index form
  std::vector<int> customers_;
  std::vector<std::size_t> table_topic_;

  std::vector<double> weights_;
  std::vector<double> topic_weights_;
  std::vector<double> log_weights_;
  std::vector<double> scratch_;
};

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& field, const std::filesystem::path& path) {
  double v = 0.0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw Error(ErrorKind::kSchema, path.string() + ": bad number '" + field + "'");
  }
  return v;
}

}  // namespace

void PredictConfig::validate() const {
  if (!(sweeps > burn_in)) throw Error(ErrorKind::kInvalidArgument, "prediction sweeps must exceed burn_in");
}

PredictionInput align_review(const TrainedModel& model, const Corpus& corpus, std::size_t d) {
  const Review& review = corpus.reviews.at(d);
  PredictionInput in;
  in.review_id = review.review_id;
  in.true_rating = review.rating;
  const bool same_vocab = model.vocabulary == corpus.vocabulary;
  for (WordId w : review.tokens) {
    if (same_vocab) {
      in.tokens.push_back(w);
    } else if (auto id = model.vocabulary.find(corpus.vocabulary.word(w))) {
      in.tokens.push_back(*id);
    } else {
      ++in.dropped_tokens;
    }
  }
  in.author = model.find_author(corpus.author_ids.at(review.author));
  return in;
}

Prediction predict(const TrainedModel& model, const PredictionInput& review, const PredictConfig& config) {
  config.validate();
  Prediction out;
  out.review_id = review.review_id;
  out.true_rating = review.true_rating;
  if (review.tokens.empty()) {
    out.oov = true;
    out.predicted_rating = model.hyper.mu;
    return out;
  }
  FrozenSampler sampler(model, review, config.seed);
  sampler.initialize();
  double sum = 0.0;
  double last = model.hyper.mu;
  for (std::size_t it = 1; it <= config.sweeps; ++it) {
    sampler.sweep();
    if (it <= config.burn_in) continue;
    last = sampler.review_mean();
    sum += last;
    if (config.keep_trace) out.trace.push_back(last);
  }
  const double estimate = config.average_over_sweeps ? sum / static_cast<double>(config.sweeps - config.burn_in) : last;
  out.predicted_rating = std::clamp(estimate, 1.0, 5.0);
  return out;
}

std::uint64_t review_stream_seed(std::uint64_t seed, std::string_view review_id) {
  return mix_seed(seed ^ stable_hash(review_id));
}

std::vector<Prediction> predict_batch(const TrainedModel& model, const Corpus& corpus, const PredictConfig& config,
                                      std::size_t jobs) {
  config.validate();
  std::vector<Prediction> out(corpus.reviews.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t d = next++; d < out.size(); d = next++) {
      const Review& review = corpus.reviews[d];
      try {
        PredictConfig local = config;
        local.seed = review_stream_seed(config.seed, review.review_id);
        out[d] = predict(model, align_review(model, corpus, d), local);
      } catch (const std::exception& e) {
        out[d].review_id = review.review_id;
        out[d].true_rating = review.rating;
        out[d].error = e.what();
      }
    }
  };
  jobs = std::max<std::size_t>(1, std::min(jobs, out.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return out;
}

void write_predictions(const std::filesystem::path& path, const std::vector<Prediction>& predictions) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  os << "review_id\ttrue_rating\tpredicted_rating\toov\n";
  for (const Prediction& p : predictions) {
    if (!p.error.empty()) continue;
    os << p.review_id << '\t' << (p.true_rating ? format_double(*p.true_rating) : std::string()) << '\t'
       << format_double(p.predicted_rating) << '\t' << (p.oov ? 1 : 0) << '\n';
  }
  if (!os) throw Error(ErrorKind::kIo, "failed writing " + path.string());
}

std::vector<Prediction> read_predictions(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  std::string line;
  if (!std::getline(is, line) || line != "review_id\ttrue_rating\tpredicted_rating\toov") {
    throw Error(ErrorKind::kSchema, path.string() + ": missing predictions header");
  }
  std::vector<Prediction> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) fields.push_back(field);
    if (line.back() == '\t') fields.emplace_back();
    if (fields.size() != 4) throw Error(ErrorKind::kSchema, path.string() + ": expected 4 columns");
    Prediction p;
    p.review_id = fields[0];
    if (!fields[1].empty()) p.true_rating = parse_double(fields[1], path);
    p.predicted_rating = parse_double(fields[2], path);
    if (fields[3] != "0" && fields[3] != "1") throw Error(ErrorKind::kSchema, path.string() + ": bad oov flag");
    p.oov = fields[3] == "1";
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace tspra
