// tspra: command-line front end for the review model pipeline.
//
//   preprocess -> train -> predict -> evaluate -> analyze, plus synth and sweep.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error, 3 I/O error,
// 4 malformed input file. Every successful run writes one JSON manifest next
// to its outputs; passing that manifest back through --config repeats the run.

#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "json_config.hpp"
#include "tspra/analysis.hpp"
#include "tspra/common.hpp"
#include "tspra/corpus.hpp"
#include "tspra/evaluation.hpp"
#include "tspra/generator.hpp"
#include "tspra/model_core.hpp"
#include "tspra/predictor.hpp"
#include "tspra/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

enum Exit : int { kOk = 0, kFailure = 1, kUsage = 2, kIoError = 3, kSchemaError = 4 };

int exit_code_for(tspra::ErrorKind kind) {
  switch (kind) {
    case tspra::ErrorKind::kInvalidArgument: return kUsage;
    case tspra::ErrorKind::kIo: return kIoError;
    case tspra::ErrorKind::kSchema: return kSchemaError;
    case tspra::ErrorKind::kInfeasible: return kFailure;
  }
  return kFailure;
}

const char* category(int code) {
  switch (code) {
    case kUsage: return "usage error";
    case kIoError: return "i/o error";
    case kSchemaError: return "schema error";
    default: return "error";
  }
}

tspra::SplitSelector parse_split(const std::string& name) {
  if (name == "train") return tspra::SplitSelector::kTrain;
  if (name == "test") return tspra::SplitSelector::kTest;
  return tspra::SplitSelector::kAll;
}

std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class Manifest {
 public:
  explicit Manifest(const CLI::App& sub) : sub_(sub), start_(std::chrono::steady_clock::now()) {}

  void input(const std::string& role, const fs::path& p) { inputs_[role] = p.string(); }
  void output(const fs::path& p) { outputs_.push_back(p.string()); }
  void seed(std::uint64_t s) { seed_ = s; }

  void write(const fs::path& path) const {
    json doc;
    doc["tool"] = "tspra";
    doc["tool_version"] = kVersion;
    doc["subcommand"] = sub_.get_name();
    // Resolved options under the subcommand's name, so the file is a valid
    // --config for repeating the run.
    doc[sub_.get_name()] = tspra::cli::JsonConfig::dump(&sub_, true);
    if (seed_) doc["seed"] = *seed_;
    doc["inputs"] = inputs_;
    doc["outputs"] = outputs_;
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    doc["timings"] = {{"wall_seconds", seconds}};
    std::ofstream os(path, std::ios::binary);
    if (!os) throw tspra::Error(tspra::ErrorKind::kIo, "cannot write " + path.string());
    os << doc.dump(2) << '\n';
    if (!os) throw tspra::Error(tspra::ErrorKind::kIo, "failed writing " + path.string());
  }

 private:
  const CLI::App& sub_;
  std::chrono::steady_clock::time_point start_;
  json inputs_ = json::object();
  std::vector<std::string> outputs_;
  std::optional<std::uint64_t> seed_;
};

fs::path manifest_beside(const fs::path& out) { return fs::path(out.string() + ".manifest.json"); }

void add_hyper_options(CLI::App* sub, tspra::HyperParams& h) {
  sub->add_option("--mu", h.mu, "Neutral rating")->group("Model");
  sub->add_option("--sigma2", h.sigma2, "Rating noise variance")->group("Model");
  sub->add_option("--gamma", h.gamma, "Top-level concentration")->group("Model");
  sub->add_option("--alpha", h.alpha, "Per-review concentration")->group("Model");
  sub->add_option("--beta", h.beta, "Topic-word smoothing")->group("Model");
  sub->add_option("--eta", h.eta, "Preference smoothing")->group("Model");
  sub->add_option("--lambda", h.lambda, "Sentiment smoothing")->group("Model");
}

// --- subcommands ------------------------------------------------------------

struct PreprocessArgs {
  std::string input, out;
  std::size_t min_count = 2;
  tspra::SplitOptions split;
};

void run_preprocess(const CLI::App& sub, const PreprocessArgs& a) {
  Manifest m(sub);
  m.input("reviews", a.input);
  m.seed(a.split.seed);
  const tspra::LoadResult loaded = tspra::load_reviews(a.input);
  for (const auto& w : loaded.warnings) std::cerr << "skipped: " << w << '\n';
  const tspra::Corpus corpus = tspra::build_corpus(loaded.reviews, a.min_count);
  const tspra::CorpusSplit split = tspra::split_by_author(corpus, a.split);
  tspra::save_encoded_corpus(a.out, split);
  std::cerr << "reviews " << loaded.reviews.size() << " (skipped " << loaded.skipped << "), vocabulary "
            << corpus.vocabulary.size() << ", train " << split.train.reviews.size() << ", test "
            << split.test.reviews.size() << '\n';
  m.output(a.out);
  m.write(manifest_beside(a.out));
}

struct TrainArgs {
  std::string corpus, out, split = "train", checkpoint_dir;
  tspra::HyperParams hyper;
  tspra::TrainConfig config;
  bool quiet = false;
};

void run_train(const CLI::App& sub, const TrainArgs& a) {
  Manifest m(sub);
  m.input("corpus", a.corpus);
  m.seed(a.config.seed);
  const tspra::Corpus corpus = tspra::load_encoded_corpus(a.corpus, parse_split(a.split));
  tspra::TrainConfig config = a.config;
  if (a.checkpoint_dir.empty()) config.checkpoint_every = 0;
  if (!a.checkpoint_dir.empty()) fs::create_directories(a.checkpoint_dir);

  tspra::TrainHooks hooks;
  if (!a.quiet) {
    hooks.on_sweep = [](const tspra::SweepStats& s) {
      std::fprintf(stderr, "sweep %zu%s K=%zu tables=%d log_score=%.4f (seating %.4f words %.4f sentiments %.4f "
                           "preferences %.4f ratings %.4f)\n",
                   s.sweep, s.burn_in ? " [burn-in]" : "", s.topics, s.tables, s.score.total(), s.score.seating,
                   s.score.words, s.score.sentiments, s.score.preferences, s.score.ratings);
    };
  }
  if (!a.checkpoint_dir.empty()) {
    hooks.on_checkpoint = [&](std::size_t sweep, const tspra::TrainedModel& model) {
      const fs::path path = fs::path(a.checkpoint_dir) / ("checkpoint_" + std::to_string(sweep) + ".json");
      tspra::save_model(path, model, sweep);
      m.output(path);
    };
  }
  const tspra::TrainedModel model = tspra::train(corpus, a.hyper, config, hooks);
  tspra::save_model(a.out, model);
  m.output(a.out);
  m.write(manifest_beside(a.out));
}

struct PredictArgs {
  std::string model, corpus, out, split = "test";
  tspra::PredictConfig config;
  bool final_state = false;
  std::size_t jobs = 1;
};

void run_predict(const CLI::App& sub, const PredictArgs& a) {
  Manifest m(sub);
  m.input("model", a.model);
  m.input("corpus", a.corpus);
  m.seed(a.config.seed);
  const tspra::TrainedModel model = tspra::load_model(a.model);
  const tspra::Corpus corpus = tspra::load_encoded_corpus(a.corpus, parse_split(a.split));
  tspra::PredictConfig config = a.config;
  config.average_over_sweeps = !a.final_state;
  const auto predictions = tspra::predict_batch(model, corpus, config, a.jobs);
  std::size_t failed = 0;
  for (const auto& p : predictions) {
    if (!p.error.empty()) {
      ++failed;
      std::cerr << "review " << p.review_id << ": " << p.error << '\n';
    }
  }
  tspra::write_predictions(a.out, predictions);
  std::cerr << "predicted " << predictions.size() - failed << " reviews, " << failed << " failed\n";
  m.output(a.out);
  m.write(manifest_beside(a.out));
}

struct EvaluateArgs {
  std::string predictions, out, model;
  double mu = 3.5;
};

// Reports the model next to two in-repo baselines: a constant-mu predictor
// and, when the model is given, the mean training rating.
void run_evaluate(const CLI::App& sub, const EvaluateArgs& a) {
  Manifest m(sub);
  m.input("predictions", a.predictions);
  const auto predictions = tspra::read_predictions(a.predictions);
  std::vector<double> truth, pred;
  for (const auto& p : predictions) {
    if (!p.true_rating) continue;
    truth.push_back(*p.true_rating);
    pred.push_back(p.predicted_rating);
  }
  if (truth.empty()) throw tspra::Error(tspra::ErrorKind::kInvalidArgument, "no predictions with a true rating");
  std::vector<tspra::LabelledReport> rows;
  rows.push_back({"model", tspra::evaluate(truth, pred)});
  rows.push_back({"constant_mu", tspra::evaluate(truth, std::vector<double>(truth.size(), a.mu))});
  if (!a.model.empty()) {
    m.input("model", a.model);
    const tspra::TrainedModel model = tspra::load_model(a.model);
    rows.push_back({"train_mean", tspra::evaluate(truth, std::vector<double>(truth.size(), model.train_mean_rating))});
  }
  tspra::write_metric_reports(a.out, rows);
  for (const auto& row : rows) {
    std::cerr << row.label << ": n=" << row.report.n << " mae=" << num(row.report.mae) << " pearson="
              << (row.report.pearson ? num(*row.report.pearson) : "NA") << " inverted_pairs="
              << row.report.inverted_pairs << '\n';
  }
  m.output(a.out);
  m.write(manifest_beside(a.out));
}

struct AnalyzeArgs {
  std::string model, out;
  tspra::AnalysisOptions options;
};

void run_analyze(const CLI::App& sub, const AnalyzeArgs& a) {
  Manifest m(sub);
  m.input("model", a.model);
  const tspra::TrainedModel model = tspra::load_model(a.model);
  for (const auto& path : tspra::write_analysis_report(a.out, model, a.options)) m.output(path);
  m.write(fs::path(a.out) / "manifest.json");
}

struct SynthArgs {
  std::string spec, out, truth_out;
};

void run_synth(const CLI::App& sub, const SynthArgs& a) {
  Manifest m(sub);
  m.input("spec", a.spec);
  const tspra::GenSpecFile file = tspra::load_gen_spec(a.spec);
  m.seed(file.spec.seed);
  const tspra::SyntheticCorpus synth = tspra::generate(file.spec);
  if (file.split) {
    tspra::save_encoded_corpus(a.out, tspra::split_by_author(synth.corpus, *file.split));
  } else {
    tspra::save_encoded_corpus(a.out, synth.corpus);
  }
  m.output(a.out);
  if (!a.truth_out.empty()) {
    tspra::save_model(a.truth_out, tspra::truth_model(synth));
    m.output(a.truth_out);
  }
  m.write(manifest_beside(a.out));
}

struct SweepArgs {
  std::string corpus, grid, out;
  tspra::HyperParams hyper;
  tspra::TrainConfig train;
  tspra::PredictConfig predict;
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
};

void run_sweep(const CLI::App& sub, const SweepArgs& a) {
  Manifest m(sub);
  m.input("corpus", a.corpus);
  m.seed(a.seed);
  const tspra::Corpus train = tspra::load_encoded_corpus(a.corpus, tspra::SplitSelector::kTrain);
  const tspra::Corpus test = tspra::load_encoded_corpus(a.corpus, tspra::SplitSelector::kTest);
  const auto grid = tspra::parse_grid(a.grid, a.hyper);
  tspra::TrainConfig train_config = a.train;
  train_config.seed = a.seed;
  train_config.checkpoint_every = 0;
  tspra::PredictConfig predict_config = a.predict;
  predict_config.seed = a.seed;
  const auto result = tspra::sweep_parameters(train, test, grid, a.hyper, train_config, predict_config, a.jobs);
  for (const auto& f : result.failures) {
    std::cerr << "grid point mu=" << num(f.point.mu) << " sigma2=" << num(f.point.sigma2) << " failed: " << f.message
              << '\n';
  }
  tspra::write_sweep_table(a.out, result);
  m.output(a.out);
  m.write(manifest_beside(a.out));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topic, sentiment and preference model for review ratings", "tspra"};
  app.config_formatter(std::make_shared<tspra::cli::JsonConfig>());
  app.set_config("--config", "", "JSON file supplying any option; the command line wins");
  app.allow_config_extras(CLI::config_extras_mode::ignore);
  app.set_version_flag("--version", kVersion);
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1, 1);

  PreprocessArgs pre;
  auto* preprocess = app.add_subcommand("preprocess", "Normalize raw reviews and split them per author");
  preprocess->add_option("--input", pre.input, "JSON Lines review file")->required();
  preprocess->add_option("--out", pre.out, "Encoded corpus to write")->required();
  preprocess->add_option("--min-count", pre.min_count, "Minimum corpus frequency of a kept word");
  preprocess->add_option("--train-frac", pre.split.train_fraction, "Share of each author's reviews used for training");
  preprocess->add_option("--min-train", pre.split.min_train, "Minimum training reviews per kept author");
  preprocess->add_option("--min-test", pre.split.min_test, "Minimum test reviews per kept author");
  preprocess->add_option("--max-train", pre.split.max_train_total, "Cap on the total training reviews");
  preprocess->add_option("--seed", pre.split.seed, "Seed for the author-dropping order");

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "Fit the model by collapsed Gibbs sampling");
  train->add_option("--corpus", tr.corpus, "Encoded corpus")->required();
  train->add_option("--out", tr.out, "Model file to write")->required();
  train->add_option("--split", tr.split, "Reviews to train on")->check(CLI::IsMember({"train", "test", "all"}));
  train->add_option("--sweeps", tr.config.sweeps, "Gibbs sweeps");
  train->add_option("--burn-in", tr.config.burn_in, "Sweeps logged as burn-in");
  train->add_option("--seed", tr.config.seed, "Random seed");
  add_hyper_options(train, tr.hyper);
  train->add_flag("--debug-invariants", tr.config.debug_invariants, "Recount and check every invariant after each sweep");
  train->add_option("--checkpoint-dir", tr.checkpoint_dir, "Directory for periodic model checkpoints");
  train->add_option("--checkpoint-every", tr.config.checkpoint_every, "Sweeps between checkpoints");
  train->add_flag("--quiet", tr.quiet, "Suppress the per-sweep log");

  PredictArgs pr;
  auto* predict = app.add_subcommand("predict", "Predict ratings of held-out reviews");
  predict->add_option("--model", pr.model, "Trained model file")->required();
  predict->add_option("--corpus", pr.corpus, "Encoded corpus")->required();
  predict->add_option("--out", pr.out, "Predictions file to write")->required();
  predict->add_option("--split", pr.split, "Reviews to predict")->check(CLI::IsMember({"train", "test", "all"}));
  predict->add_option("--sweeps", pr.config.sweeps, "Sampling sweeps per review");
  predict->add_option("--burn-in", pr.config.burn_in, "Sweeps discarded before averaging");
  predict->add_option("--seed", pr.config.seed, "Random seed");
  predict->add_flag("--final-state", pr.final_state, "Use the last sweep's review mean instead of the average");
  predict->add_option("--jobs", pr.jobs, "Worker threads")->check(CLI::PositiveNumber);

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against true ratings");
  evaluate->add_option("--predictions", ev.predictions, "Predictions file")->required();
  evaluate->add_option("--out", ev.out, "Metric report to write")->required();
  evaluate->add_option("--model", ev.model, "Model whose training mean serves as a baseline");
  evaluate->add_option("--mu", ev.mu, "Rating used by the constant baseline");

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Word polarity and critical-aspect reports");
  analyze->add_option("--model", an.model, "Trained model file")->required();
  analyze->add_option("--out", an.out, "Report directory")->required();
  analyze->add_option("--pref-floor", an.options.pref_floor, "Minimum preference of a critical aspect");
  analyze->add_option("--ratio", an.options.ratio_threshold, "Preference/sentiment ratio that marks an aspect critical");
  analyze->add_option("--top-n", an.options.top_n, "Words listed per aspect and polarity extreme");
  analyze->add_option("--bins", an.options.histogram_bins, "Polarity histogram bins")->check(CLI::PositiveNumber);

  SynthArgs sy;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus from a generator spec");
  synth->add_option("--spec", sy.spec, "Generator spec (JSON)")->required();
  synth->add_option("--out", sy.out, "Encoded corpus to write")->required();
  synth->add_option("--truth-out", sy.truth_out, "Generating tables, written as a model file");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Train and evaluate over a grid of mu and sigma2");
  sweep->add_option("--corpus", sw.corpus, "Encoded corpus with train and test splits")->required();
  sweep->add_option("--grid", sw.grid, "Grid such as \"mu=3,3.5,4;sigma2=0.04,0.08\"")->required();
  sweep->add_option("--out", sw.out, "Sweep table to write")->required();
  sweep->add_option("--sweeps", sw.train.sweeps, "Training sweeps per grid point");
  sweep->add_option("--burn-in", sw.train.burn_in, "Training sweeps logged as burn-in");
  sweep->add_option("--predict-sweeps", sw.predict.sweeps, "Sampling sweeps per predicted review");
  sweep->add_option("--predict-burn-in", sw.predict.burn_in, "Prediction sweeps discarded before averaging");
  sweep->add_option("--seed", sw.seed, "Random seed for training and prediction");
  add_hyper_options(sweep, sw.hyper);
  sweep->add_option("--jobs", sw.jobs, "Grid points run concurrently")->check(CLI::PositiveNumber);

  for (CLI::App* sub : app.get_subcommands({})) sub->configurable();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (preprocess->parsed()) run_preprocess(*preprocess, pre);
    if (train->parsed()) run_train(*train, tr);
    if (predict->parsed()) run_predict(*predict, pr);
    if (evaluate->parsed()) run_evaluate(*evaluate, ev);
    if (analyze->parsed()) run_analyze(*analyze, an);
    if (synth->parsed()) run_synth(*synth, sy);
    if (sweep->parsed()) run_sweep(*sweep, sw);
  } catch (const tspra::Error& e) {
    const int code = exit_code_for(e.kind());
    std::cerr << "tspra: " << category(code) << ": " << e.what() << '\n';
    return code;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "tspra: " << category(kIoError) << ": " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    std::cerr << "tspra: " << category(kFailure) << ": " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}
