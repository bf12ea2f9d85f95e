#include "tspra/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tspra/common.hpp"
#include "tspra/random.hpp"

namespace tspra {

namespace {

using nlohmann::json;

constexpr std::size_t S = kNumSentiments;
constexpr std::size_t U = kNumPreferences;
constexpr double kNormTolerance = 1e-9;

void dirichlet(Rng& rng, const double* alpha, std::size_t n, double* out) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += (out[i] = rng.gamma(alpha[i]));
  if (!(total > 0.0)) {
    // Every gamma draw underflowed; only possible for tiny shapes.
    out[rng.below(n)] = total = 1.0;
  }
  for (std::size_t i = 0; i < n; ++i) out[i] /= total;
}

void check_rows(const std::vector<double>& table, std::size_t rows, std::size_t width, const char* name) {
  if (table.empty()) return;
  if (table.size() != rows * width) {
    throw Error(ErrorKind::kInvalidArgument, std::string("planted ") + name + " has the wrong size");
  }
  for (std::size_t r = 0; r < rows; ++r) {
    double total = 0.0;
    for (std::size_t c = 0; c < width; ++c) {
      const double v = table[r * width + c];
      if (!(v >= 0.0)) throw Error(ErrorKind::kInvalidArgument, std::string("planted ") + name + " has a negative entry");
      total += v;
    }
    if (std::abs(total - 1.0) > kNormTolerance * width) {
      throw Error(ErrorKind::kInvalidArgument, std::string("planted ") + name + " row does not sum to 1");
    }
  }
}

std::string padded(char prefix, std::size_t value, std::size_t count) {
  std::size_t digits = 1;
  for (std::size_t c = count > 0 ? count - 1 : 0; c >= 10; c /= 10) ++digits;
  std::string s = std::to_string(value);
  return prefix + std::string(digits > s.size() ? digits - s.size() : 0, '0') + s;
}

Rng table_stream(const GenSpec& spec) { return Rng(mix_seed(spec.seed ^ 1)); }
Rng document_stream(const GenSpec& spec) { return Rng(mix_seed(spec.seed ^ 2)); }

}  // namespace

void GenSpec::validate() const {
  if (num_topics == 0 || vocab_size == 0 || num_authors == 0 || num_reviews == 0 || num_products == 0) {
    throw Error(ErrorKind::kInvalidArgument, "generator sizes must be positive");
  }
  if (!(doc_length_mean > 0.0) || doc_length_min == 0) {
    throw Error(ErrorKind::kInvalidArgument, "doc length mean and minimum must be positive");
  }
  hyper.validate();
  if (!sentiment_prior.empty() && sentiment_prior.size() != 1 && sentiment_prior.size() != num_topics) {
    throw Error(ErrorKind::kInvalidArgument, "sentiment_prior needs 1 or K_true entries");
  }
  for (const auto& row : sentiment_prior) {
    for (double a : row) {
      if (!(a > 0.0)) throw Error(ErrorKind::kInvalidArgument, "sentiment_prior entries must be positive");
    }
  }
  if (preference_prior) {
    for (double a : *preference_prior) {
      if (!(a > 0.0)) throw Error(ErrorKind::kInvalidArgument, "preference_prior entries must be positive");
    }
  }
  check_rows(phi, num_topics, vocab_size, "phi");
  check_rows(pi, num_topics * vocab_size, S, "pi");
  check_rows(psi, num_topics * num_authors, U, "psi");
}

GenSpec materialize_tables(const GenSpec& input) {
  input.validate();
  GenSpec spec = input;
  const std::size_t K = spec.num_topics, V = spec.vocab_size, X = spec.num_authors;
  const HyperParams& h = spec.hyper;
  Rng rng = table_stream(spec);
  // Draw all three tables unconditionally so a planted table never shifts the
  // stream used for the others.
  std::vector<double> phi(K * V), pi(K * V * S), psi(K * X * U);
  const std::vector<double> beta(V, h.beta);
  for (std::size_t k = 0; k < K; ++k) dirichlet(rng, beta.data(), V, &phi[k * V]);
  for (std::size_t k = 0; k < K; ++k) {
    std::array<double, S> prior{h.lambda, h.lambda, h.lambda};
    if (spec.sentiment_prior.size() == 1) prior = spec.sentiment_prior[0];
    if (spec.sentiment_prior.size() == K) prior = spec.sentiment_prior[k];
    for (std::size_t w = 0; w < V; ++w) dirichlet(rng, prior.data(), S, &pi[(k * V + w) * S]);
  }
  const std::array<double, U> pref_prior = spec.preference_prior.value_or(std::array<double, U>{h.eta, h.eta});
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t x = 0; x < X; ++x) dirichlet(rng, pref_prior.data(), U, &psi[(k * X + x) * U]);
  }
  if (spec.phi.empty()) spec.phi = std::move(phi);
  if (spec.pi.empty()) spec.pi = std::move(pi);
  if (spec.psi.empty()) spec.psi = std::move(psi);
  return spec;
}

SyntheticCorpus generate(const GenSpec& input) {
  const GenSpec spec = materialize_tables(input);
  const std::size_t K = spec.num_topics, V = spec.vocab_size, X = spec.num_authors, D = spec.num_reviews;
  const HyperParams& h = spec.hyper;
  const double sigma = std::sqrt(h.sigma2);

  SyntheticCorpus out;
  out.phi = spec.phi;
  out.pi = spec.pi;
  out.psi = spec.psi;
  out.hyper = h;

  std::vector<std::string> words(V);
  for (std::size_t w = 0; w < V; ++w) words[w] = padded('w', w, V);
  out.corpus.vocabulary = Vocabulary(std::move(words));
  out.corpus.author_ids.resize(X);
  for (std::size_t x = 0; x < X; ++x) out.corpus.author_ids[x] = padded('a', x, X);
  out.corpus.num_products = spec.num_products;

  Rng rng = document_stream(spec);
  std::vector<int> topic_tables(K, 0);  // m_k of the fixed pool
  int total_tables = 0;
  std::vector<double> weights;
  std::vector<std::size_t> unused;

  auto draw_table_topic = [&]() -> TopicId {
    weights.assign(topic_tables.begin(), topic_tables.end());
    weights.push_back(h.gamma);
    std::size_t k = rng.categorical(weights);
    if (k == K) {
      unused.clear();
      for (std::size_t j = 0; j < K; ++j) {
        if (topic_tables[j] == 0) unused.push_back(j);
      }
      k = unused.empty() ? rng.below(K) : unused[rng.below(unused.size())];
    }
    ++topic_tables[k];
    ++total_tables;
    return static_cast<TopicId>(k);
  };

  out.assignments.docs.resize(D);
  out.corpus.reviews.resize(D);
  out.review_mean.resize(D);
  out.raw_rating.resize(D);
  for (std::size_t d = 0; d < D; ++d) {
    Review& review = out.corpus.reviews[d];
    DocAssignments& doc = out.assignments.docs[d];
    review.review_id = padded('r', d, D);
    review.author = rng.below(X);
    review.product_id = padded('p', rng.below(spec.num_products), spec.num_products);
    const std::size_t n = std::max(spec.doc_length_min, rng.poisson(spec.doc_length_mean));

    std::vector<int> customers;
    PolarTally tally;
    for (std::size_t i = 0; i < n; ++i) {
      weights.assign(customers.begin(), customers.end());
      weights.push_back(h.alpha);
      std::size_t t = rng.categorical(weights);
      if (t == customers.size()) {
        customers.push_back(0);
        doc.table_topic.push_back(draw_table_topic());
      }
      ++customers[t];
      const auto k = static_cast<std::size_t>(doc.table_topic[t]);
      const WordId w = static_cast<WordId>(rng.categorical(std::span<const double>(&spec.phi[k * V], V)));
      const Sentiment s = sentiment_at(rng.categorical(std::span<const double>(&spec.pi[(k * V + w) * S], S)));
      const Preference u =
          preference_at(rng.categorical(std::span<const double>(&spec.psi[(k * X + review.author) * U], U)));
      review.tokens.push_back(w);
      doc.table.push_back(static_cast<std::uint32_t>(t));
      doc.sentiment.push_back(s);
      doc.preference.push_back(u);
      doc.word_rating.push_back(word_rating(u, s, h.mu));
      tally.add(u, s, 1);
    }
    out.review_mean[d] = tally.mean(h.mu);
    out.raw_rating[d] = rng.normal(out.review_mean[d], sigma);
    review.rating = std::clamp(out.raw_rating[d], 1.0, 5.0);
  }
  return out;
}

GenSpec plant_critical_aspect(const GenSpec& input, std::size_t aspect, double preference_level,
                              double sentiment_level) {
  if (aspect >= input.num_topics) throw Error(ErrorKind::kInfeasible, "aspect index exceeds K_true");
  if (!(preference_level >= 0.0 && preference_level <= 1.0)) {
    throw Error(ErrorKind::kInfeasible, "preference level must lie in [0, 1]");
  }
  if (!(sentiment_level >= -1.0 && sentiment_level <= 1.0)) {
    throw Error(ErrorKind::kInfeasible, "sentiment level must lie in [-1, 1]");
  }
  GenSpec spec = materialize_tables(input);
  const std::size_t V = spec.vocab_size, X = spec.num_authors;
  for (std::size_t x = 0; x < X; ++x) {
    double* row = &spec.psi[(aspect * X + x) * U];
    row[index_of(Preference::kWeak)] = 1.0 - preference_level;
    row[index_of(Preference::kStrong)] = preference_level;
  }
  double polar_mass = 0.0;
  for (std::size_t w = 0; w < V; ++w) {
    double* row = &spec.pi[(aspect * V + w) * S];
    const double polar = 1.0 - row[index_of(Sentiment::kNeutral)];
    row[index_of(Sentiment::kPositive)] = polar * (1.0 + sentiment_level) / 2.0;
    row[index_of(Sentiment::kNegative)] = polar * (1.0 - sentiment_level) / 2.0;
    polar_mass += polar;
  }
  if (!(polar_mass > 0.0)) {
    throw Error(ErrorKind::kInfeasible, "aspect has no non-neutral sentiment mass; sentiment level cannot be planted");
  }
  return spec;
}

TrainedModel truth_model(const SyntheticCorpus& synth) {
  TrainedModel model;
  model.hyper = synth.hyper;
  model.vocabulary = synth.corpus.vocabulary;
  model.author_ids = synth.corpus.author_ids;
  model.num_topics = synth.phi.size() / synth.corpus.vocabulary.size();
  model.phi = synth.phi;
  model.pi = synth.pi;
  model.psi = synth.psi;
  model.topic_tables.assign(model.num_topics, 0);
  for (const DocAssignments& doc : synth.assignments.docs) {
    for (TopicId k : doc.table_topic) {
      ++model.topic_tables[k];
      ++model.total_tables;
    }
  }
  double total = 0.0;
  for (const Review& r : synth.corpus.reviews) total += r.rating;
  model.train_mean_rating = synth.corpus.reviews.empty() ? synth.hyper.mu : total / synth.corpus.reviews.size();
  return model;
}

// --- spec files -------------------------------------------------------------

GenSpecFile gen_spec_from_json(std::string_view text) {
  json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) throw Error(ErrorKind::kSchema, "generator spec is not a JSON object");
  GenSpecFile file;
  GenSpec& spec = file.spec;
  try {
    spec.num_topics = doc.value("K_true", spec.num_topics);
    spec.vocab_size = doc.value("V", spec.vocab_size);
    spec.num_authors = doc.value("X", spec.num_authors);
    spec.num_reviews = doc.value("D", spec.num_reviews);
    spec.num_products = doc.value("P", spec.num_products);
    spec.doc_length_mean = doc.value("doc_length_mean", spec.doc_length_mean);
    spec.doc_length_min = doc.value("doc_length_min", spec.doc_length_min);
    spec.seed = doc.value("seed", spec.seed);
    if (doc.contains("hyper")) {
      const json& h = doc.at("hyper");
      spec.hyper.gamma = h.value("gamma", spec.hyper.gamma);
      spec.hyper.alpha = h.value("alpha", spec.hyper.alpha);
      spec.hyper.beta = h.value("beta", spec.hyper.beta);
      spec.hyper.eta = h.value("eta", spec.hyper.eta);
      spec.hyper.lambda = h.value("lambda", spec.hyper.lambda);
      spec.hyper.mu = h.value("mu", spec.hyper.mu);
      spec.hyper.sigma2 = h.value("sigma2", spec.hyper.sigma2);
    }
    if (doc.contains("sentiment_prior")) {
      spec.sentiment_prior = doc.at("sentiment_prior").get<std::vector<std::array<double, S>>>();
    }
    if (doc.contains("preference_prior")) spec.preference_prior = doc.at("preference_prior").get<std::array<double, U>>();
    if (doc.contains("phi")) spec.phi = doc.at("phi").get<std::vector<double>>();
    if (doc.contains("pi")) spec.pi = doc.at("pi").get<std::vector<double>>();
    if (doc.contains("psi")) spec.psi = doc.at("psi").get<std::vector<double>>();
    spec.validate();
    if (doc.contains("critical_aspects")) {
      for (const json& c : doc.at("critical_aspects")) {
        spec = plant_critical_aspect(spec, c.at("aspect").get<std::size_t>(), c.at("preference").get<double>(),
                                     c.at("sentiment").get<double>());
      }
    }
    if (doc.contains("split")) {
      const json& s = doc.at("split");
      SplitOptions opt;
      opt.train_fraction = s.value("train_fraction", opt.train_fraction);
      opt.min_train = s.value("min_train", opt.min_train);
      opt.min_test = s.value("min_test", opt.min_test);
      opt.max_train_total = s.value("max_train_total", opt.max_train_total);
      opt.seed = s.value("seed", spec.seed);
      file.split = opt;
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kSchema, std::string("malformed generator spec: ") + e.what());
  }
  return file;
}

GenSpecFile load_gen_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot read generator spec: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return gen_spec_from_json(buffer.str());
}

std::string gen_spec_to_json(const GenSpec& spec) {
  json out;
  out["K_true"] = spec.num_topics;
  out["V"] = spec.vocab_size;
  out["X"] = spec.num_authors;
  out["D"] = spec.num_reviews;
  out["P"] = spec.num_products;
  out["doc_length_mean"] = spec.doc_length_mean;
  out["doc_length_min"] = spec.doc_length_min;
  out["seed"] = spec.seed;
  const HyperParams& h = spec.hyper;
  out["hyper"] = {{"gamma", h.gamma}, {"alpha", h.alpha}, {"beta", h.beta},    {"eta", h.eta},
                  {"lambda", h.lambda}, {"mu", h.mu},     {"sigma2", h.sigma2}};
  if (!spec.sentiment_prior.empty()) out["sentiment_prior"] = spec.sentiment_prior;
  if (spec.preference_prior) out["preference_prior"] = *spec.preference_prior;
  if (!spec.phi.empty()) out["phi"] = spec.phi;
  if (!spec.pi.empty()) out["pi"] = spec.pi;
  if (!spec.psi.empty()) out["psi"] = spec.psi;
  return out.dump(2);
}

}  // namespace tspra
