// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Every run uses fixed seeds.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tspra/analysis.hpp"
#include "tspra/corpus.hpp"
#include "tspra/evaluation.hpp"
#include "tspra/generator.hpp"
#include "tspra/model_core.hpp"
#include "tspra/predictor.hpp"
#include "tspra/trainer.hpp"

using namespace tspra;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return d / std::sqrt(na * nb);
}

std::vector<double> phi_row(const std::vector<double>& phi, std::size_t k, std::size_t V) {
  return {phi.begin() + static_cast<std::ptrdiff_t>(k * V), phi.begin() + static_cast<std::ptrdiff_t>((k + 1) * V)};
}

// Index of the learned topic whose phi row is closest to the planted row.
std::size_t best_match(const TrainedModel& m, const std::vector<double>& planted, std::size_t k) {
  const std::size_t V = m.vocab_size();
  const auto target = phi_row(planted, k, V);
  std::size_t best = 0;
  double best_cos = -1.0;
  for (std::size_t j = 0; j < m.num_topics; ++j) {
    const double c = cosine(target, phi_row(m.phi, j, V));
    if (c > best_cos) {
      best_cos = c;
      best = j;
    }
  }
  return best;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// --- 1 ----------------------------------------------------------------------

Outcome count_consistency() {
  std::mt19937 gen(20);
  Corpus c;
  std::vector<std::string> words;
  for (int w = 0; w < 12; ++w) words.push_back("w" + std::to_string(w));
  c.vocabulary = Vocabulary(words);
  c.author_ids = {"a0", "a1", "a2", "a3"};
  c.num_products = 1;
  for (int d = 0; d < 20; ++d) {
    Review r;
    r.review_id = "r" + std::to_string(d);
    r.product_id = "p";
    r.author = static_cast<std::size_t>(d % 4);
    r.rating = 1.0 + static_cast<double>(gen() % 5);
    const int len = 3 + static_cast<int>(gen() % 8);
    for (int i = 0; i < len; ++i) r.tokens.push_back(static_cast<WordId>(gen() % 12));
    c.reviews.push_back(r);
  }
  const auto start = std::chrono::steady_clock::now();
  ModelState st = init_state(c, HyperParams{}, 5);
  for (int s = 0; s <= 50; ++s) {
    if (s > 0) sweep(st);
    if (!(recount(st.assignments(), c) == st.counts())) return {false, fmt("recount mismatch after sweep %d", s)};
    if (auto why = check_marginals(st.counts(), c)) return {false, fmt("sweep %d: %s", s, why->c_str())};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {secs < 10.0, fmt("init + 50 sweeps consistent, %.2f s (limit 10 s)", secs)};
}

// --- 2 ----------------------------------------------------------------------

Outcome tiny_posterior() {
  struct Instance {
    int w0, w1;
    double rating;
  };
  const Instance instances[] = {{0, 1, 5.0}, {0, 0, 4.0}, {1, 2, 2.0}};
  const HyperParams h;
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::string detail;
  for (const auto& inst : instances) {
    Corpus c;
    c.vocabulary = Vocabulary({"a", "b", "c"});
    c.author_ids = {"x"};
    c.num_products = 1;
    Review r;
    r.review_id = "r";
    r.product_id = "p";
    r.rating = inst.rating;
    r.tokens = {static_cast<WordId>(inst.w0), static_cast<WordId>(inst.w1)};
    c.reviews.push_back(r);
    const auto exact = oracle::tiny_posterior(h, inst.w0, inst.w1, 3, inst.rating);
    ModelState st = init_state(c, h, 11);
    constexpr int kBurn = 1000, kDraws = 50000;
    std::array<double, oracle::kTinyCells> freq{};
    for (int it = 0; it < kBurn + kDraws; ++it) {
      sweep(st);
      if (it < kBurn) continue;
      const auto& d = st.assignments().docs[0];
      // Table structure: shared table, separate tables on one topic, or two topics.
      const int structure =
          d.table[0] == d.table[1] ? 0 : (d.table_topic[d.table[0]] == d.table_topic[d.table[1]] ? 1 : 2);
      auto lab = [&](int i) { return static_cast<int>(index_of(d.preference[i]) * 3 + index_of(d.sentiment[i])); };
      freq[static_cast<std::size_t>(structure * 36 + lab(0) * 6 + lab(1))] += 1.0 / kDraws;
    }
    const double dist = oracle::l1(freq, exact);
    worst = std::max(worst, dist);
    detail += fmt(" (%d,%d,r=%.0f) L1=%.4f", inst.w0, inst.w1, inst.rating, dist);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worst <= 0.05 && secs < 60.0, fmt("%s, %.1f s (limits 0.05, 60 s)", detail.c_str() + 1, secs)};
}

// --- 3 ----------------------------------------------------------------------

Outcome six_cell() {
  Corpus c;
  c.vocabulary = Vocabulary({"a", "b", "c"});
  c.author_ids = {"x"};
  c.num_products = 1;
  auto add = [&](double rating, std::vector<WordId> tokens) {
    Review r;
    r.review_id = "r" + std::to_string(c.reviews.size());
    r.product_id = "p";
    r.rating = rating;
    r.tokens = std::move(tokens);
    c.reviews.push_back(r);
  };
  add(4.2, {0, 1, 2});
  add(1.0, {0, 0});
  const HyperParams h;
  const auto start = std::chrono::steady_clock::now();
  ModelState st(c, h, 3);
  const std::uint32_t t = st.attach_word(0, 0, kNewTable, kNewTopic, Sentiment::kPositive, Preference::kStrong);
  const TopicId k = st.assignments().docs[0].table_topic[t];
  st.attach_word(0, 1, t, kNoTopic, Sentiment::kPositive, Preference::kWeak);
  st.attach_word(0, 2, t, kNoTopic, Sentiment::kNeutral, Preference::kStrong);
  const std::uint32_t t1 = st.attach_word(1, 0, kNewTable, k, Sentiment::kNegative, Preference::kStrong);
  st.attach_word(1, 1, t1, kNoTopic, Sentiment::kNeutral, Preference::kWeak);
  // With word (0, 0) removed: author counts (weak, strong) = (2, 2) on topic
  // k, word 0 sentiments (-, 0, +) = (1, 1, 0), other words (u, s) = (0, +1)
  // and (1, 0).
  const auto exact = oracle::six_cell(h, {2, 2}, {1, 1, 0}, {{0, 1}, {1, 0}}, 4.2);
  constexpr int kDraws = 50000;
  std::array<double, 6> freq{};
  for (int n = 0; n < kDraws; ++n) {
    resample_sentiment_preference(st, 0, 0);
    const auto& d = st.assignments().docs[0];
    freq[label_cell(d.preference[0], d.sentiment[0])] += 1.0 / kDraws;
  }
  const double dist = oracle::l1(freq, exact);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {dist <= 0.05 && secs < 30.0, fmt("L1=%.4f over %d draws, %.2f s (limits 0.05, 30 s)", dist, kDraws, secs)};
}

// --- 4 ----------------------------------------------------------------------

Outcome recovery() {
  GenSpec g;  // K=3, V=50, X=10, D=300, Poisson(40) lengths
  g.seed = 1;
  const auto synth = generate(g);
  TrainConfig cfg;
  cfg.sweeps = 1000;
  cfg.burn_in = 500;
  cfg.seed = 7;
  const auto start = std::chrono::steady_clock::now();
  const TrainedModel m = train(synth.corpus, HyperParams{}, cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::size_t V = g.vocab_size;
  // Greedy one-to-one matching on descending cosine.
  struct Pair {
    double cos;
    std::size_t planted, learned;
  };
  std::vector<Pair> pairs;
  for (std::size_t a = 0; a < g.num_topics; ++a) {
    for (std::size_t k = 0; k < m.num_topics; ++k) {
      pairs.push_back({cosine(phi_row(synth.phi, a, V), phi_row(m.phi, k, V)), a, k});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.cos > y.cos; });
  std::vector<bool> used_a(g.num_topics), used_k(m.num_topics);
  double sum = 0.0;
  std::size_t matched = 0;
  for (const auto& p : pairs) {
    if (used_a[p.planted] || used_k[p.learned]) continue;
    used_a[p.planted] = used_k[p.learned] = true;
    sum += p.cos;
    ++matched;
  }
  // Planted rows left unmatched (fewer learned topics) count as cosine 0.
  const double mean_cos = sum / static_cast<double>(g.num_topics);
  const bool pass = mean_cos >= 0.8 && m.num_topics >= 2 && m.num_topics <= 6 && secs < 300.0;
  return {pass, fmt("mean cosine %.3f over %zu matches, K=%zu, %.0f s (limits 0.8, [2,6], 300 s)", mean_cos, matched,
                    m.num_topics, secs)};
}

// --- 5 ----------------------------------------------------------------------

Outcome prediction_vs_baselines() {
  GenSpec g;
  g.seed = 1;
  // Per-topic sentiment skew: one mostly negative, one mostly positive and
  // one mostly neutral aspect, so that word content carries rating signal.
  g.sentiment_prior = {{4.0, 1.0, 0.3}, {0.3, 1.0, 4.0}, {1.0, 4.0, 1.0}};
  const auto synth = generate(g);
  const auto split = split_by_author(synth.corpus);
  TrainConfig cfg;
  cfg.sweeps = 1000;
  cfg.burn_in = 500;
  cfg.seed = 7;
  const TrainedModel m = train(split.train, HyperParams{}, cfg);
  PredictConfig pc;
  pc.seed = 3;
  const auto preds = predict_batch(m, split.test, pc);
  std::vector<double> truth, pred, flat, train_mean;
  for (const auto& p : preds) {
    truth.push_back(*p.true_rating);
    pred.push_back(p.predicted_rating);
    flat.push_back(m.hyper.mu);
    train_mean.push_back(m.train_mean_rating);
  }
  const double model_mae = mae(truth, pred), mu_mae = mae(truth, flat), mean_mae = mae(truth, train_mean);
  const bool pass = model_mae <= 0.9 * mu_mae && model_mae <= 0.9 * mean_mae;
  return {pass, fmt("n=%zu MAE model %.3f, constant mu %.3f (ratio %.3f), train mean %.3f (ratio %.3f); limit 0.9",
                    truth.size(), model_mae, mu_mae, model_mae / mu_mae, mean_mae, model_mae / mean_mae)};
}

// --- 6 ----------------------------------------------------------------------

Outcome polarity_recovery() {
  GenSpec g;
  g.seed = 1;
  g.hyper.alpha = 0.1;
  g.hyper.gamma = 10.0;
  g.hyper.beta = 0.05;
  g = materialize_tables(g);
  const std::size_t V = g.vocab_size, X = g.num_authors;
  const WordId pos_word = 0, neg_word = 1;
  // Every other word is neutral, so a review containing only the positive
  // word among its polar tokens has r-bar 5 or (5 + mu) / 2, and likewise 1
  // or (1 + mu) / 2 for the negative word.
  for (std::size_t k = 0; k < g.num_topics; ++k) {
    for (std::size_t w = 0; w < V; ++w) {
      double* p = &g.pi[(k * V + w) * kNumSentiments];
      p[0] = 0.0;
      p[1] = 1.0;
      p[2] = 0.0;
    }
    for (std::size_t x = 0; x < X; ++x) {
      g.psi[(k * X + x) * kNumPreferences] = 0.5;
      g.psi[(k * X + x) * kNumPreferences + 1] = 0.5;
    }
    double* phi = &g.phi[k * V];
    const double fp = k == 0 ? 0.1 : 0.03, fn = k == 1 ? 0.1 : 0.03;
    const double rest = 1.0 - phi[pos_word] - phi[neg_word];
    for (std::size_t w = 0; w < V; ++w) phi[w] *= (1.0 - fp - fn) / rest;
    phi[pos_word] = fp;
    phi[neg_word] = fn;
    double* p = &g.pi[(k * V + pos_word) * kNumSentiments];
    p[0] = 0.0, p[1] = 0.0, p[2] = 1.0;
    p = &g.pi[(k * V + neg_word) * kNumSentiments];
    p[0] = 1.0, p[1] = 0.0, p[2] = 0.0;
  }
  g.validate();
  const auto synth = generate(g);
  TrainConfig cfg;
  cfg.sweeps = 1000;
  cfg.burn_in = 500;
  cfg.seed = 7;
  const TrainedModel m = train(synth.corpus, HyperParams{}, cfg);
  const double pp = word_polarity(m, pos_word), pn = word_polarity(m, neg_word);
  return {pp > 0.5 && pn < -0.5, fmt("positive word %.3f (limit > 0.5), negative word %.3f (limit < -0.5)", pp, pn)};
}

// --- 7 ----------------------------------------------------------------------

Outcome critical_recovery() {
  GenSpec g;
  g.seed = 1;
  const std::size_t V = 30;
  g.vocab_size = V;
  g.num_reviews = 3000;
  g.doc_length_mean = 6.0;
  g.doc_length_min = 3;
  g.hyper.alpha = 0.1;
  g.hyper.gamma = 1e9;  // every table draws a fresh topic from the planted rows
  g.sentiment_prior = {{0.3, 0.05, 0.3}};
  // Topic k owns a block of V/3 words carrying 80% of its mass.
  const double own = 0.8;
  g.phi.assign(g.num_topics * V, 0.0);
  for (std::size_t k = 0; k < g.num_topics; ++k) {
    const std::size_t lo = k * V / 3, hi = (k + 1) * V / 3;
    for (std::size_t w = 0; w < V; ++w) {
      g.phi[k * V + w] = (w >= lo && w < hi) ? own / static_cast<double>(hi - lo)
                                             : (1.0 - own) / static_cast<double>(V - (hi - lo));
    }
  }
  const double levels[2][2] = {{0.6, -0.4}, {0.65, 0.6}};
  for (std::size_t k = 0; k < 2; ++k) {
    g = plant_critical_aspect(g, k, levels[k][0], levels[k][1]);
    // Keep the aspect sentiment but make each word wholly positive or wholly
    // negative, which the sampler separates far more reliably than mixed rows.
    double polar_total = 0.0;
    for (std::size_t w = 0; w < V; ++w) polar_total += 1.0 - g.pi[(k * V + w) * kNumSentiments + 1];
    const double target = polar_total * (1.0 + levels[k][1]) / 2.0;
    double acc = 0.0;
    for (std::size_t w = 0; w < V; ++w) {
      double* p = &g.pi[(k * V + w) * kNumSentiments];
      const double polar = 1.0 - p[1];
      const double take = std::min(polar, std::max(0.0, target - acc));
      acc += take;
      p[2] = take;
      p[0] = polar - take;
    }
  }
  g.validate();
  const auto synth = generate(g);
  const TrainedModel truth = truth_model(synth);
  TrainConfig cfg;
  cfg.sweeps = 1000;
  cfg.burn_in = 500;
  cfg.seed = 7;
  const TrainedModel m = train(synth.corpus, HyperParams{}, cfg);
  const auto aspects = critical_aspects(m);
  auto summary_of = [&](std::size_t topic) {
    return *std::find_if(aspects.begin(), aspects.end(), [&](const AspectSummary& a) { return a.topic == topic; });
  };
  const AspectSummary crit = summary_of(best_match(m, synth.phi, 0));
  const AspectSummary safe = summary_of(best_match(m, synth.phi, 1));
  const bool pass = crit.topic != safe.topic && crit.critical && !safe.critical;
  return {pass, fmt("planted (0.60,-0.40) [truth %.3f,%.3f] -> learned (%.3f,%.3f) %s; "
                    "planted (0.65,0.60) [truth %.3f,%.3f] -> learned (%.3f,%.3f) %s",
                    aspect_preference(truth, 0), aspect_sentiment(truth, 0), crit.preference, crit.sentiment,
                    crit.critical ? "flagged" : "not flagged", aspect_preference(truth, 1), aspect_sentiment(truth, 1),
                    safe.preference, safe.sentiment, safe.critical ? "flagged" : "not flagged")};
}

// --- 8 ----------------------------------------------------------------------

Outcome metric_exactness() {
  using V = std::vector<double>;
  std::vector<std::string> bad;
  auto check = [&](bool ok, const char* what) {
    if (!ok) bad.push_back(what);
  };
  check(mae(V{1, 2, 3}, V{1, 2, 3}) == 0.0, "mae zero");
  check(mae(V{4, 3}, V{5, 1}) == 1.5, "mae 1.5");
  check(mae(V{5}, V{3.5}) == 1.5, "mae single");
  check(std::abs(*pearson(V{1, 2, 3, 4}, V{1, 2, 3, 4}) - 1.0) < 1e-15, "pearson +1");
  check(std::abs(*pearson(V{1, 2, 3, 4}, V{9, 8, 7, 6}) + 1.0) < 1e-15, "pearson -1");
  check(std::abs(*pearson(V{1, 2, 3}, V{1, 2, 4}) - 3.0 / std::sqrt(28.0 / 3.0)) < 1e-15, "pearson 0.98198");
  check(!pearson(V{2, 2, 2}, V{1, 2, 3}), "pearson constant");
  check(inverted_pairs(V{1, 2, 3}, V{1.5, 2.5, 3.5}) == 0, "inverted 0");
  check(inverted_pairs(V{1, 2}, V{2, 1}) == 1, "inverted 1");
  check(inverted_pairs(V{5, 3, 1}, V{1, 3, 5}) == 3, "inverted 3");
  std::mt19937 gen(2024);
  int random_mismatch = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = gen() % 51;
    V truth, pred;
    for (std::size_t i = 0; i < n; ++i) {
      truth.push_back(1.0 + static_cast<double>(gen() % 5));
      pred.push_back(1.0 + 0.25 * static_cast<double>(gen() % 17));
    }
    if (inverted_pairs(truth, pred) != oracle::inverted_pairs_brute(truth, pred)) ++random_mismatch;
  }
  check(random_mismatch == 0, "inverted random");
  std::string detail = fmt("10 hand examples, 100 random inverted-pair instances (%d mismatches)", random_mismatch);
  for (const auto& b : bad) detail += "; failed " + b;
  return {bad.empty(), detail};
}

// --- 9 ----------------------------------------------------------------------

int run(const std::string& cmd) { return std::system((cmd + " >/dev/null 2>&1").c_str()); }

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / fmt("tspra_acceptance_%d", static_cast<int>(std::random_device{}()));
  fs::create_directories(root);
  {
    std::ofstream spec(root / "spec.json");
    spec << R"({"K_true": 3, "V": 40, "X": 8, "D": 120, "doc_length_mean": 20, "seed": 5,
               "critical_aspects": [{"aspect": 0, "preference": 0.6, "sentiment": -0.4}],
               "split": {"train_fraction": 0.8}})";
  }
  const std::string cli = TSPRA_CLI_PATH;
  const std::vector<std::string> outputs = {"model.json",     "predictions.tsv",  "metrics.tsv",
                                            "report/polarity.tsv", "report/aspects.tsv", "report/top_words.tsv",
                                            "report/polarity_extremes.tsv", "report/polarity_histogram.tsv",
                                            "corpus.json"};
  std::vector<std::vector<std::string>> runs;
  for (int r = 0; r < 2; ++r) {
    const fs::path dir = root / fmt("run%d", r);
    fs::create_directories(dir);
    const std::string d = dir.string();
    const std::string steps[] = {
        cli + " synth --spec " + (root / "spec.json").string() + " --out " + d + "/corpus.json",
        cli + " train --quiet --corpus " + d + "/corpus.json --out " + d + "/model.json --sweeps 60 --burn-in 30 --seed 9",
        cli + " predict --model " + d + "/model.json --corpus " + d + "/corpus.json --out " + d +
            "/predictions.tsv --sweeps 40 --burn-in 20 --seed 4 --jobs 2",
        cli + " evaluate --predictions " + d + "/predictions.tsv --model " + d + "/model.json --out " + d +
            "/metrics.tsv",
        cli + " analyze --model " + d + "/model.json --out " + d + "/report",
    };
    for (const auto& s : steps) {
      if (run(s) != 0) {
        fs::remove_all(root);
        return {false, "pipeline step failed: " + s};
      }
    }
    std::vector<std::string> contents;
    for (const auto& o : outputs) contents.push_back(slurp(dir / o));
    runs.push_back(std::move(contents));
  }
  fs::remove_all(root);
  std::vector<std::string> differing;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (runs[0][i] != runs[1][i] || runs[0][i].empty()) differing.push_back(outputs[i]);
  }
  std::string detail = fmt("%zu output files compared byte for byte", outputs.size());
  for (const auto& o : differing) detail += "; differs or empty: " + o;
  return {differing.empty(), detail};
}

// --- 10 ---------------------------------------------------------------------

Outcome sigma2_invariance() {
  GenSpec g;
  g.seed = 2;
  g.num_reviews = 150;
  const auto split = split_by_author(generate(g).corpus);
  TrainConfig cfg;
  cfg.sweeps = 100;
  cfg.burn_in = 50;
  cfg.seed = 7;
  const TrainedModel base = train(split.train, HyperParams{}, cfg);
  PredictConfig pc;
  pc.seed = 5;
  std::vector<std::vector<Prediction>> runs;
  for (double s2 : {0.04, 0.08, 0.16}) {
    TrainedModel m = base;
    m.hyper.sigma2 = s2;
    runs.push_back(predict_batch(m, split.test, pc));
  }
  std::size_t differing = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    for (std::size_t i = 0; i < runs[0].size(); ++i) {
      if (runs[r][i].predicted_rating != runs[0][i].predicted_rating) ++differing;
    }
  }
  return {differing == 0 && !runs[0].empty(),
          fmt("%zu test reviews x 3 values of sigma2, %zu differing predictions", runs[0].size(), differing)};
}

// --- 11 ---------------------------------------------------------------------

Outcome mu_sweep() {
  GenSpec g;
  g.seed = 1;
  // Positive sentiment dominates every aspect, so ratings skew high.
  g.sentiment_prior = {{0.5, 0.5, 2.0}};
  const auto synth = generate(g);
  const auto split = split_by_author(synth.corpus);
  double mean_rating = 0.0;
  for (const auto& r : split.train.reviews) mean_rating += r.rating;
  mean_rating /= static_cast<double>(split.train.reviews.size());
  TrainConfig tc;
  tc.sweeps = 300;
  tc.burn_in = 150;
  tc.seed = 7;
  PredictConfig pc;
  pc.seed = 3;
  const auto grid = parse_grid("mu=3.0,3.25,3.5,3.75,4.0", HyperParams{});
  const SweepResult result = sweep_parameters(split.train, split.test, grid, HyperParams{}, tc, pc);
  if (!result.failures.empty() || result.rows.size() != grid.size()) return {false, "sweep point failed"};
  std::size_t best = 0;
  std::string curve;
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    if (result.rows[i].report.mae < result.rows[best].report.mae) best = i;
    curve += fmt(" %.2f:%.3f", result.rows[i].point.mu, result.rows[i].report.mae);
  }
  const double best_mu = result.rows[best].point.mu;
  return {best_mu > 3.0,
          fmt("train mean rating %.2f; MAE by mu%s; minimum at mu=%.2f", mean_rating, curve.c_str(), best_mu)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"count consistency", count_consistency},
      {"tiny posterior", tiny_posterior},
      {"six-cell conditional", six_cell},
      {"parameter recovery", recovery},
      {"prediction beats baselines", prediction_vs_baselines},
      {"polarity recovery", polarity_recovery},
      {"critical aspect recovery", critical_recovery},
      {"metric exactness", metric_exactness},
      {"determinism", determinism},
      {"sigma2 invariance", sigma2_invariance},
      {"mu sweep minimum above 3", mu_sweep},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
  return failures == 0 ? 0 : 1;
}
