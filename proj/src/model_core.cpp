#include "tspra/model_core.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "tspra/common.hpp"

namespace tspra {

using nlohmann::json;

namespace {

constexpr const char* kModelFormatTag = "tspra-model";
constexpr int kModelFormatVersion = 1;

constexpr std::size_t S = kNumSentiments;
constexpr std::size_t U = kNumPreferences;

int at_or_zero(const std::vector<int>& v, std::size_t i) { return i < v.size() ? v[i] : 0; }

bool rows_equal(const std::vector<std::vector<int>>& a, const std::vector<std::vector<int>>& b, std::size_t k,
                std::size_t width) {
  for (std::size_t j = 0; j < width; ++j) {
    const int x = k < a.size() ? at_or_zero(a[k], j) : 0;
    const int y = k < b.size() ? at_or_zero(b[k], j) : 0;
    if (x != y) return false;
  }
  return true;
}

// log Gamma(a + n) - log Gamma(a), the log rising factorial.
double log_rising(double a, int n) { return n == 0 ? 0.0 : std::lgamma(a + n) - std::lgamma(a); }

}  // namespace

// --- hyperparameters and rating rule ---------------------------------------

void HyperParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorKind::kInvalidArgument, std::string(name) + " must be a positive finite number");
    }
  };
  positive(gamma, "gamma");
  positive(alpha, "alpha");
  positive(beta, "beta");
  positive(eta, "eta");
  positive(lambda, "lambda");
  positive(sigma2, "sigma2");
  if (!(mu >= 1.0 && mu <= 5.0)) throw Error(ErrorKind::kInvalidArgument, "mu must lie in [1, 5]");
}

double word_rating(Preference u, Sentiment s, double mu) {
  switch (s) {
    case Sentiment::kNegative:
      return u == Preference::kStrong ? 1.0 : (1.0 + mu) / 2.0;
    case Sentiment::kPositive:
      return u == Preference::kStrong ? 5.0 : (5.0 + mu) / 2.0;
    case Sentiment::kNeutral:
      break;
  }
  return mu;
}

double review_mean(std::span<const double> word_ratings, std::span<const Sentiment> sentiments, double mu) {
  if (word_ratings.size() != sentiments.size()) {
    throw Error(ErrorKind::kInvalidArgument, "review_mean: ratings and sentiments differ in length");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < word_ratings.size(); ++i) {
    if (sentiments[i] == Sentiment::kNeutral) continue;
    sum += word_ratings[i];
    ++count;
  }
  return count == 0 ? mu : sum / static_cast<double>(count);
}

double rating_log_likelihood(double rating, double r_bar, double sigma2) {
  const double diff = rating - r_bar;
  return -(diff * diff) / (2.0 * sigma2);
}

double PolarTally::mean(double mu) const {
  const int n = counts[0] + counts[1] + counts[2] + counts[3];
  if (n == 0) return mu;
  const double sum = counts[0] * ((1.0 + mu) / 2.0) + counts[1] * 1.0 + counts[2] * ((5.0 + mu) / 2.0) +
                     counts[3] * 5.0;
  return sum / n;
}

double PolarTally::mean_with(Preference u, Sentiment s, double mu) const {
  if (s == Sentiment::kNeutral) return mean(mu);
  PolarTally extended = *this;
  extended.add(u, s, 1);
  return extended.mean(mu);
}

// --- count tables -----------------------------------------------------------

bool CountTables::operator==(const CountTables& other) const {
  if (vocab_size != other.vocab_size || num_authors != other.num_authors) return false;
  if (total_tables != other.total_tables || live_topics != other.live_topics) return false;
  if (table_customers.size() != other.table_customers.size()) return false;
  for (std::size_t d = 0; d < table_customers.size(); ++d) {
    const std::size_t width = std::max(table_customers[d].size(), other.table_customers[d].size());
    for (std::size_t t = 0; t < width; ++t) {
      if (at_or_zero(table_customers[d], t) != at_or_zero(other.table_customers[d], t)) return false;
    }
  }
  const std::size_t capacity = std::max(topic_capacity(), other.topic_capacity());
  for (std::size_t k = 0; k < capacity; ++k) {
    if (at_or_zero(topic_tables, k) != at_or_zero(other.topic_tables, k)) return false;
    if (at_or_zero(topic_words, k) != at_or_zero(other.topic_words, k)) return false;
    if (!rows_equal(topic_word, other.topic_word, k, vocab_size)) return false;
    if (!rows_equal(topic_word_sentiment, other.topic_word_sentiment, k, vocab_size * S)) return false;
    if (!rows_equal(topic_author, other.topic_author, k, num_authors)) return false;
    if (!rows_equal(topic_author_preference, other.topic_author_preference, k, num_authors * U)) return false;
  }
  return true;
}

CountTables recount(const Assignments& assign, const Corpus& corpus) {
  const std::size_t V = corpus.vocabulary.size();
  const std::size_t X = corpus.num_authors();
  if (assign.docs.size() != corpus.reviews.size()) {
    throw Error(ErrorKind::kSchema, "recount: assignment/corpus document count mismatch");
  }
  TopicId max_topic = kNoTopic;
  for (const auto& doc : assign.docs) {
    for (TopicId k : doc.table_topic) max_topic = std::max(max_topic, k);
  }
  const auto capacity = static_cast<std::size_t>(max_topic + 1);

  CountTables counts;
  counts.vocab_size = V;
  counts.num_authors = X;
  counts.topic_tables.assign(capacity, 0);
  counts.topic_words.assign(capacity, 0);
  counts.topic_word.assign(capacity, std::vector<int>(V, 0));
  counts.topic_word_sentiment.assign(capacity, std::vector<int>(V * S, 0));
  counts.topic_author.assign(capacity, std::vector<int>(X, 0));
  counts.topic_author_preference.assign(capacity, std::vector<int>(X * U, 0));
  counts.table_customers.resize(assign.docs.size());

  for (std::size_t d = 0; d < assign.docs.size(); ++d) {
    const DocAssignments& doc = assign.docs[d];
    const Review& review = corpus.reviews[d];
    auto& customers = counts.table_customers[d];
    customers.assign(doc.table_topic.size(), 0);
    for (std::size_t i = 0; i < doc.table.size(); ++i) {
      const std::uint32_t t = doc.table[i];
      if (t == kNoTable) continue;
      if (t >= doc.table_topic.size() || doc.table_topic[t] < 0) {
        throw Error(ErrorKind::kSchema, "recount: word (" + std::to_string(d) + "," + std::to_string(i) +
                                            ") references a missing table or topic");
      }
      const auto k = static_cast<std::size_t>(doc.table_topic[t]);
      const WordId w = review.tokens[i];
      const std::size_t x = review.author;
      ++customers[t];
      ++counts.topic_words[k];
      ++counts.topic_word[k][w];
      ++counts.topic_word_sentiment[k][w * S + index_of(doc.sentiment[i])];
      ++counts.topic_author[k][x];
      ++counts.topic_author_preference[k][x * U + index_of(doc.preference[i])];
    }
    for (std::size_t t = 0; t < doc.table_topic.size(); ++t) {
      const TopicId k = doc.table_topic[t];
      if (k < 0) continue;
      if (customers[t] == 0) {
        throw Error(ErrorKind::kSchema, "recount: review " + std::to_string(d) + " has an empty table serving topic " +
                                            std::to_string(k));
      }
      ++counts.topic_tables[k];
      ++counts.total_tables;
    }
  }
  for (int m : counts.topic_tables) counts.live_topics += m > 0 ? 1 : 0;
  return counts;
}

std::optional<std::string> check_marginals(const CountTables& counts, const Corpus& corpus) {
  const std::size_t V = counts.vocab_size;
  const std::size_t X = counts.num_authors;
  std::ostringstream why;
  for (std::size_t d = 0; d < counts.table_customers.size(); ++d) {
    int seated = 0;
    for (int n : counts.table_customers[d]) {
      if (n < 0) return "negative table occupancy in review " + std::to_string(d);
      seated += n;
    }
    if (static_cast<std::size_t>(seated) != corpus.reviews[d].tokens.size()) {
      return "sum_t n_dt != review length for review " + std::to_string(d);
    }
  }
  int tables = 0;
  std::size_t live = 0;
  for (std::size_t k = 0; k < counts.topic_capacity(); ++k) {
    const int m = counts.topic_tables[k];
    tables += m;
    if (m < 0) return "negative m_k for topic " + std::to_string(k);
    if (m > 0) ++live;
    int words = 0;
    for (std::size_t w = 0; w < V; ++w) {
      const int l = counts.topic_word[k][w];
      int by_sentiment = 0;
      for (std::size_t s = 0; s < S; ++s) {
        const int c = counts.topic_word_sentiment[k][w * S + s];
        if (c < 0) return "negative l_kws";
        by_sentiment += c;
      }
      if (by_sentiment != l) return "sum_s l_kws != l_kw for topic " + std::to_string(k);
      words += l;
    }
    if (words != counts.topic_words[k]) return "sum_w l_kw != l_k. for topic " + std::to_string(k);
    int by_author = 0;
    for (std::size_t x = 0; x < X; ++x) {
      int by_pref = 0;
      for (std::size_t u = 0; u < U; ++u) by_pref += counts.topic_author_preference[k][x * U + u];
      if (by_pref != counts.topic_author[k][x]) return "sum_u c_kxu != c_kx. for topic " + std::to_string(k);
      by_author += counts.topic_author[k][x];
    }
    if (by_author != counts.topic_words[k]) return "sum_x c_kx. != l_k. for topic " + std::to_string(k);
    if (m == 0 && words != 0) return "dead topic " + std::to_string(k) + " still owns words";
  }
  if (tables != counts.total_tables) return "sum_k m_k != m_..";
  if (live != counts.live_topics) return "live topic count K is stale";
  return std::nullopt;
}

// --- model state ------------------------------------------------------------

ModelState::ModelState(const Corpus& corpus, const HyperParams& hyper, std::uint64_t seed)
    : corpus_(&corpus), hyper_(hyper), rng_(seed) {
  hyper_.validate();
  const std::size_t D = corpus.reviews.size();
  assign_.docs.resize(D);
  tallies_.resize(D);
  counts_.vocab_size = corpus.vocabulary.size();
  counts_.num_authors = corpus.num_authors();
  counts_.table_customers.resize(D);
  for (std::size_t d = 0; d < D; ++d) {
    const std::size_t n = corpus.reviews[d].tokens.size();
    auto& doc = assign_.docs[d];
    doc.table.assign(n, kNoTable);
    doc.sentiment.assign(n, Sentiment::kNeutral);
    doc.preference.assign(n, Preference::kWeak);
    doc.word_rating.assign(n, hyper_.mu);
  }
}

TopicId ModelState::allocate_topic() {
  TopicId k;
  if (!free_topics_.empty()) {
    k = free_topics_.back();
    free_topics_.pop_back();
  } else {
    k = static_cast<TopicId>(counts_.topic_capacity());
    counts_.topic_tables.push_back(0);
    counts_.topic_words.push_back(0);
    counts_.topic_word.emplace_back(counts_.vocab_size, 0);
    counts_.topic_word_sentiment.emplace_back(counts_.vocab_size * S, 0);
    counts_.topic_author.emplace_back(counts_.num_authors, 0);
    counts_.topic_author_preference.emplace_back(counts_.num_authors * U, 0);
  }
  live_.insert(std::upper_bound(live_.begin(), live_.end(), k), k);
  ++counts_.live_topics;
  return k;
}

void ModelState::release_topic_if_dead(TopicId k) {
  if (counts_.topic_tables[k] > 0) return;
  assert(counts_.topic_words[k] == 0);
  live_.erase(std::lower_bound(live_.begin(), live_.end(), k));
  free_topics_.push_back(k);
  --counts_.live_topics;
}

void ModelState::add_labels_to_topic(std::size_t d, std::size_t i, TopicId k, int delta) {
  const auto& doc = assign_.docs[d];
  const Review& review = corpus_->reviews[d];
  const WordId w = review.tokens[i];
  const std::size_t x = review.author;
  counts_.topic_word_sentiment[k][w * S + index_of(doc.sentiment[i])] += delta;
  counts_.topic_author[k][x] += delta;
  counts_.topic_author_preference[k][x * U + index_of(doc.preference[i])] += delta;
}

void ModelState::add_word_to_topic(std::size_t d, std::size_t i, TopicId k, int delta) {
  const WordId w = corpus_->reviews[d].tokens[i];
  counts_.topic_word[k][w] += delta;
  counts_.topic_words[k] += delta;
  add_labels_to_topic(d, i, k, delta);
}

void ModelState::detach_word(std::size_t d, std::size_t i) {
  auto& doc = assign_.docs[d];
  const std::uint32_t t = doc.table[i];
  assert(t != kNoTable);
  const TopicId k = doc.table_topic[t];
  add_word_to_topic(d, i, k, -1);
  tallies_[d].add(doc.preference[i], doc.sentiment[i], -1);
  doc.table[i] = kNoTable;
  if (--counts_.table_customers[d][t] == 0) {
    doc.table_topic[t] = kNoTopic;
    --counts_.topic_tables[k];
    --counts_.total_tables;
    release_topic_if_dead(k);
  }
}

std::uint32_t ModelState::attach_word(std::size_t d, std::size_t i, std::uint32_t table, TopicId topic,
                                      Sentiment s, Preference u) {
  auto& doc = assign_.docs[d];
  auto& customers = counts_.table_customers[d];
  assert(doc.table[i] == kNoTable);
  std::uint32_t slot = table;
  if (table == kNewTable) {
    slot = 0;
    while (slot < doc.table_topic.size() && (doc.table_topic[slot] != kNoTopic || customers[slot] != 0)) ++slot;
    if (slot == doc.table_topic.size()) {
      doc.table_topic.push_back(kNoTopic);
      customers.push_back(0);
    }
    const TopicId k = topic == kNewTopic ? allocate_topic() : topic;
    assert(k >= 0);
    doc.table_topic[slot] = k;
    ++counts_.topic_tables[k];
    ++counts_.total_tables;
  }
  const TopicId k = doc.table_topic[slot];
  assert(k >= 0);
  doc.sentiment[i] = s;
  doc.preference[i] = u;
  doc.word_rating[i] = word_rating(u, s, hyper_.mu);
  doc.table[i] = slot;
  ++customers[slot];
  add_word_to_topic(d, i, k, +1);
  tallies_[d].add(u, s, +1);
  return slot;
}

void ModelState::detach_table(std::size_t d, std::uint32_t t) {
  auto& doc = assign_.docs[d];
  const TopicId k = doc.table_topic[t];
  assert(k >= 0);
  for (std::size_t i = 0; i < doc.table.size(); ++i) {
    if (doc.table[i] == t) add_word_to_topic(d, i, k, -1);
  }
  doc.table_topic[t] = kNoTopic;
  --counts_.topic_tables[k];
  --counts_.total_tables;
  release_topic_if_dead(k);
}

TopicId ModelState::attach_table(std::size_t d, std::uint32_t t, TopicId topic) {
  auto& doc = assign_.docs[d];
  assert(doc.table_topic[t] == kNoTopic && counts_.table_customers[d][t] > 0);
  const TopicId k = topic == kNewTopic ? allocate_topic() : topic;
  doc.table_topic[t] = k;
  ++counts_.topic_tables[k];
  ++counts_.total_tables;
  for (std::size_t i = 0; i < doc.table.size(); ++i) {
    if (doc.table[i] == t) add_word_to_topic(d, i, k, +1);
  }
  return k;
}

void ModelState::detach_labels(std::size_t d, std::size_t i) {
  const auto& doc = assign_.docs[d];
  add_labels_to_topic(d, i, doc.table_topic[doc.table[i]], -1);
  tallies_[d].add(doc.preference[i], doc.sentiment[i], -1);
}

void ModelState::attach_labels(std::size_t d, std::size_t i, Sentiment s, Preference u) {
  auto& doc = assign_.docs[d];
  doc.sentiment[i] = s;
  doc.preference[i] = u;
  doc.word_rating[i] = word_rating(u, s, hyper_.mu);
  add_labels_to_topic(d, i, doc.table_topic[doc.table[i]], +1);
  tallies_[d].add(u, s, +1);
}

std::vector<std::size_t> ModelState::words_at(std::size_t d, std::uint32_t t) const {
  std::vector<std::size_t> words;
  const auto& table = assign_.docs[d].table;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i] == t) words.push_back(i);
  }
  return words;
}

LogScore log_score(const ModelState& state) {
  const HyperParams& h = state.hyper();
  const CountTables& c = state.counts();
  const Corpus& corpus = state.corpus();
  const double V = static_cast<double>(c.vocab_size);
  LogScore score;

  for (std::size_t d = 0; d < corpus.reviews.size(); ++d) {
    int n = 0;
    int tables = 0;
    for (int customers : c.table_customers[d]) {
      if (customers == 0) continue;
      ++tables;
      n += customers;
      score.seating += std::lgamma(static_cast<double>(customers));
    }
    score.seating += tables * std::log(h.alpha) - log_rising(h.alpha, n);
    score.ratings += rating_log_likelihood(corpus.reviews[d].rating, state.tally(d).mean(h.mu), h.sigma2);
  }
  for (TopicId k : state.live_topics()) {
    score.seating += std::log(h.gamma) + std::lgamma(static_cast<double>(c.topic_tables[k]));
    score.words -= log_rising(V * h.beta, c.topic_words[k]);
    for (std::size_t w = 0; w < c.vocab_size; ++w) {
      const int l = c.topic_word[k][w];
      if (l == 0) continue;
      score.words += log_rising(h.beta, l);
      score.sentiments -= log_rising(S * h.lambda, l);
      for (std::size_t s = 0; s < S; ++s) {
        score.sentiments += log_rising(h.lambda, c.topic_word_sentiment[k][w * S + s]);
      }
    }
    for (std::size_t x = 0; x < c.num_authors; ++x) {
      const int n = c.topic_author[k][x];
      if (n == 0) continue;
      score.preferences -= log_rising(U * h.eta, n);
      for (std::size_t u = 0; u < U; ++u) {
        score.preferences += log_rising(h.eta, c.topic_author_preference[k][x * U + u]);
      }
    }
  }
  score.seating -= log_rising(h.gamma, c.total_tables);
  return score;
}

// --- trained model ----------------------------------------------------------

std::optional<std::size_t> TrainedModel::find_author(std::string_view id) const {
  auto it = std::find(author_ids.begin(), author_ids.end(), id);
  if (it == author_ids.end()) return std::nullopt;
  return static_cast<std::size_t>(it - author_ids.begin());
}

TrainedModel estimate_parameters(const ModelState& state) {
  const HyperParams& h = state.hyper();
  const CountTables& c = state.counts();
  const Corpus& corpus = state.corpus();
  const std::size_t V = c.vocab_size;
  const std::size_t X = c.num_authors;
  const std::vector<TopicId>& live = state.live_topics();
  const std::size_t K = live.size();

  TrainedModel model;
  model.hyper = h;
  model.vocabulary = corpus.vocabulary;
  model.author_ids = corpus.author_ids;
  model.num_topics = K;
  model.phi.resize(K * V);
  model.pi.resize(K * V * S);
  model.psi.resize(K * X * U);
  model.topic_tables.resize(K);
  model.total_tables = c.total_tables;

  for (std::size_t dense = 0; dense < K; ++dense) {
    const auto k = static_cast<std::size_t>(live[dense]);
    model.topic_tables[dense] = c.topic_tables[k];
    const double word_norm = c.topic_words[k] + static_cast<double>(V) * h.beta;
    for (std::size_t w = 0; w < V; ++w) {
      model.phi[dense * V + w] = (c.topic_word[k][w] + h.beta) / word_norm;
      const int* row = &c.topic_word_sentiment[k][w * S];
      const double sentiment_norm = row[0] + row[1] + row[2] + static_cast<double>(S) * h.lambda;
      for (std::size_t s = 0; s < S; ++s) {
        model.pi[(dense * V + w) * S + s] = (row[s] + h.lambda) / sentiment_norm;
      }
    }
    for (std::size_t x = 0; x < X; ++x) {
      const double pref_norm = c.topic_author[k][x] + static_cast<double>(U) * h.eta;
      for (std::size_t u = 0; u < U; ++u) {
        model.psi[(dense * X + x) * U + u] = (c.topic_author_preference[k][x * U + u] + h.eta) / pref_norm;
      }
    }
  }

  double rating_sum = 0.0;
  for (const auto& r : corpus.reviews) rating_sum += r.rating;
  model.train_mean_rating = corpus.reviews.empty() ? h.mu : rating_sum / static_cast<double>(corpus.reviews.size());
  return model;
}

std::string model_to_json(const TrainedModel& model, std::optional<std::size_t> sweep) {
  json out;
  out["format"] = kModelFormatTag;
  out["version"] = kModelFormatVersion;
  if (sweep) out["sweep"] = *sweep;
  out["hyper"] = {{"gamma", model.hyper.gamma}, {"alpha", model.hyper.alpha}, {"beta", model.hyper.beta},
                  {"eta", model.hyper.eta},     {"lambda", model.hyper.lambda}, {"mu", model.hyper.mu},
                  {"sigma2", model.hyper.sigma2}};
  out["dims"] = {{"S", S}, {"U", U}};
  out["vocabulary"] = model.vocabulary.words();
  out["authors"] = model.author_ids;
  out["num_topics"] = model.num_topics;
  out["topic_tables"] = model.topic_tables;
  out["total_tables"] = model.total_tables;
  out["train_mean_rating"] = model.train_mean_rating;
  out["phi"] = model.phi;
  out["pi"] = model.pi;
  out["psi"] = model.psi;
  return out.dump();
}

TrainedModel model_from_json(std::string_view text) {
  json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) throw Error(ErrorKind::kSchema, "model file is not valid JSON");
  if (doc.value("format", "") != kModelFormatTag) throw Error(ErrorKind::kSchema, "not a model file");
  if (doc.value("version", 0) != kModelFormatVersion) throw Error(ErrorKind::kSchema, "unsupported model version");
  try {
    TrainedModel model;
    const json& h = doc.at("hyper");
    model.hyper.gamma = h.at("gamma").get<double>();
    model.hyper.alpha = h.at("alpha").get<double>();
    model.hyper.beta = h.at("beta").get<double>();
    model.hyper.eta = h.at("eta").get<double>();
    model.hyper.lambda = h.at("lambda").get<double>();
    model.hyper.mu = h.at("mu").get<double>();
    model.hyper.sigma2 = h.at("sigma2").get<double>();
    if (doc.at("dims").at("S").get<std::size_t>() != S || doc.at("dims").at("U").get<std::size_t>() != U) {
      throw Error(ErrorKind::kSchema, "model dimensions S/U do not match this build");
    }
    model.vocabulary = Vocabulary(doc.at("vocabulary").get<std::vector<std::string>>());
    model.author_ids = doc.at("authors").get<std::vector<std::string>>();
    model.num_topics = doc.at("num_topics").get<std::size_t>();
    model.topic_tables = doc.at("topic_tables").get<std::vector<int>>();
    model.total_tables = doc.at("total_tables").get<int>();
    model.train_mean_rating = doc.at("train_mean_rating").get<double>();
    model.phi = doc.at("phi").get<std::vector<double>>();
    model.pi = doc.at("pi").get<std::vector<double>>();
    model.psi = doc.at("psi").get<std::vector<double>>();
    const std::size_t K = model.num_topics;
    if (model.phi.size() != K * model.vocab_size() || model.pi.size() != K * model.vocab_size() * S ||
        model.psi.size() != K * model.num_authors() * U || model.topic_tables.size() != K) {
      throw Error(ErrorKind::kSchema, "model tables do not match the declared dimensions");
    }
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kSchema, std::string("malformed model file: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const TrainedModel& model, std::optional<std::size_t> sweep) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot open for writing: " + path.string());
  out << model_to_json(model, sweep) << '\n';
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot read model file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return model_from_json(buffer.str());
}

}  // namespace tspra
