#include "tspra/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "tspra/common.hpp"

namespace tspra {

namespace {

std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::ofstream open_report(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  return os;
}

double polar_ratio(double diff, double total) {
  if (!(total > 0.0)) return 0.0;
  return std::clamp(diff / total, -1.0, 1.0);
}

}  // namespace

double word_polarity(const TrainedModel& model, WordId w) {
  double diff = 0.0, total = 0.0;
  for (std::size_t k = 0; k < model.num_topics; ++k) {
    const double pos = model.pi_at(k, w, Sentiment::kPositive);
    const double neg = model.pi_at(k, w, Sentiment::kNegative);
    diff += pos - neg;
    total += pos + neg;
  }
  return polar_ratio(diff, total);
}

double aspect_preference(const TrainedModel& model, std::size_t k) {
  const std::size_t X = model.num_authors();
  if (X == 0) return 0.0;
  double total = 0.0;
  for (std::size_t x = 0; x < X; ++x) total += model.psi_at(k, x, Preference::kStrong);
  return std::clamp(total / static_cast<double>(X), 0.0, 1.0);
}

double aspect_sentiment(const TrainedModel& model, std::size_t k) {
  double diff = 0.0, total = 0.0;
  for (std::size_t w = 0; w < model.vocab_size(); ++w) {
    const double pos = model.pi_at(k, w, Sentiment::kPositive);
    const double neg = model.pi_at(k, w, Sentiment::kNegative);
    diff += pos - neg;
    total += pos + neg;
  }
  return polar_ratio(diff, total);
}

bool is_critical(double preference, double sentiment, double pref_floor, double ratio_threshold) {
  if (preference < pref_floor) return false;
  return sentiment <= 0.0 || preference / sentiment > ratio_threshold;
}

std::vector<WeightedWord> top_words(const TrainedModel& model, std::size_t k, std::size_t n) {
  std::vector<WeightedWord> words;
  words.reserve(model.vocab_size());
  for (std::size_t w = 0; w < model.vocab_size(); ++w) {
    words.emplace_back(static_cast<WordId>(w), model.phi_at(k, w));
  }
  n = std::min(n, words.size());
  std::partial_sort(words.begin(), words.begin() + n, words.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  words.resize(n);
  return words;
}

std::vector<AspectSummary> critical_aspects(const TrainedModel& model, double pref_floor, double ratio_threshold,
                                            std::size_t top_n) {
  std::vector<AspectSummary> out;
  for (std::size_t k = 0; k < model.num_topics; ++k) {
    AspectSummary a;
    a.topic = k;
    a.preference = aspect_preference(model, k);
    a.sentiment = aspect_sentiment(model, k);
    a.critical = is_critical(a.preference, a.sentiment, pref_floor, ratio_threshold);
    a.top_words = top_words(model, k, top_n);
    out.push_back(std::move(a));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const AspectSummary& a, const AspectSummary& b) { return a.preference > b.preference; });
  return out;
}

std::vector<double> polarity_table(const TrainedModel& model) {
  std::vector<double> out(model.vocab_size());
  for (std::size_t w = 0; w < out.size(); ++w) out[w] = word_polarity(model, static_cast<WordId>(w));
  return out;
}

PolarityExtremes polarity_extremes(const TrainedModel& model, std::size_t n) {
  const std::vector<double> polarity = polarity_table(model);
  std::vector<WeightedWord> words;
  for (std::size_t w = 0; w < polarity.size(); ++w) words.emplace_back(static_cast<WordId>(w), polarity[w]);
  n = std::min(n, words.size());
  PolarityExtremes out;
  out.positive = words;
  std::stable_sort(out.positive.begin(), out.positive.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  out.positive.resize(n);
  out.negative = words;
  std::stable_sort(out.negative.begin(), out.negative.end(),
                   [](const auto& a, const auto& b) { return a.second < b.second; });
  out.negative.resize(n);
  return out;
}

Histogram polarity_histogram(const TrainedModel& model, std::size_t bins) {
  if (bins == 0) throw Error(ErrorKind::kInvalidArgument, "histogram needs at least one bin");
  Histogram h;
  for (std::size_t b = 0; b <= bins; ++b) h.edges.push_back(-1.0 + 2.0 * static_cast<double>(b) / bins);
  h.counts.assign(bins, 0);
  for (double p : polarity_table(model)) {
    // Bins are half-open [lo, hi) except the last, which includes +1.
    auto b = static_cast<std::size_t>(std::floor((p + 1.0) / 2.0 * static_cast<double>(bins)));
    ++h.counts[std::min(b, bins - 1)];
  }
  return h;
}

std::vector<std::filesystem::path> write_analysis_report(const std::filesystem::path& dir, const TrainedModel& model,
                                                         const AnalysisOptions& options) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  const auto& vocab = model.vocabulary;

  {
    const auto path = dir / "polarity.tsv";
    auto os = open_report(path);
    os << "word\tpolarity\n";
    const auto polarity = polarity_table(model);
    for (std::size_t w = 0; w < polarity.size(); ++w) os << vocab.word(static_cast<WordId>(w)) << '\t' << num(polarity[w]) << '\n';
    written.push_back(path);
  }
  {
    const auto path = dir / "polarity_extremes.tsv";
    auto os = open_report(path);
    os << "rank\tpositive_word\tpositive_polarity\tnegative_word\tnegative_polarity\n";
    const auto ext = polarity_extremes(model, options.top_n);
    for (std::size_t r = 0; r < ext.positive.size(); ++r) {
      os << r + 1 << '\t' << vocab.word(ext.positive[r].first) << '\t' << num(ext.positive[r].second) << '\t'
         << vocab.word(ext.negative[r].first) << '\t' << num(ext.negative[r].second) << '\n';
    }
    written.push_back(path);
  }
  const auto aspects = critical_aspects(model, options.pref_floor, options.ratio_threshold, options.top_n);
  {
    const auto path = dir / "aspects.tsv";
    auto os = open_report(path);
    os << "topic\tpreference\tsentiment\tcritical\n";
    for (const auto& a : aspects) {
      os << a.topic << '\t' << num(a.preference) << '\t' << num(a.sentiment) << '\t' << (a.critical ? 1 : 0) << '\n';
    }
    written.push_back(path);
  }
  {
    const auto path = dir / "top_words.tsv";
    auto os = open_report(path);
    os << "topic\tcritical\trank\tword\tweight\n";
    for (const auto& a : aspects) {
      for (std::size_t r = 0; r < a.top_words.size(); ++r) {
        os << a.topic << '\t' << (a.critical ? 1 : 0) << '\t' << r + 1 << '\t' << vocab.word(a.top_words[r].first)
           << '\t' << num(a.top_words[r].second) << '\n';
      }
    }
    written.push_back(path);
  }
  {
    const auto path = dir / "polarity_histogram.tsv";
    auto os = open_report(path);
    os << "bin_low\tbin_high\tcount\n";
    const auto h = polarity_histogram(model, options.histogram_bins);
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      os << num(h.edges[b]) << '\t' << num(h.edges[b + 1]) << '\t' << h.counts[b] << '\n';
    }
    written.push_back(path);
  }
  return written;
}

}  // namespace tspra
