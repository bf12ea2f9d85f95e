#include "tspra/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <thread>

#include "tspra/common.hpp"

namespace tspra {

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.size() != b.size()) throw Error(ErrorKind::kInvalidArgument, std::string(what) + ": length mismatch");
}

std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Counts of inserted ranks 1..n with prefix sums.
class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}
  void add(std::size_t rank) {
    for (; rank < tree_.size(); rank += rank & (~rank + 1)) ++tree_[rank];
  }
  std::uint64_t prefix(std::size_t rank) const {
    std::uint64_t total = 0;
    for (; rank > 0; rank -= rank & (~rank + 1)) total += tree_[rank];
    return total;
  }

 private:
  std::vector<std::uint64_t> tree_;
};

}  // namespace

double mae(std::span<const double> truth, std::span<const double> pred) {
  check_lengths(truth, pred, "mae");
  if (truth.empty()) throw Error(ErrorKind::kInvalidArgument, "mae: empty input");
  double total = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) total += std::abs(truth[i] - pred[i]);
  return total / static_cast<double>(truth.size());
}

std::optional<double> pearson(std::span<const double> truth, std::span<const double> pred) {
  check_lengths(truth, pred, "pearson");
  const std::size_t n = truth.size();
  if (n < 2) return std::nullopt;
  const double mx = std::accumulate(truth.begin(), truth.end(), 0.0) / n;
  const double my = std::accumulate(pred.begin(), pred.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = truth[i] - mx, dy = pred[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::uint64_t inverted_pairs(std::span<const double> truth, std::span<const double> pred) {
  check_lengths(truth, pred, "inverted_pairs");
  const std::size_t n = truth.size();
  std::vector<double> sorted_pred(pred.begin(), pred.end());
  std::sort(sorted_pred.begin(), sorted_pred.end());
  sorted_pred.erase(std::unique(sorted_pred.begin(), sorted_pred.end()), sorted_pred.end());
  auto rank_of = [&](double v) {
    return static_cast<std::size_t>(std::lower_bound(sorted_pred.begin(), sorted_pred.end(), v) - sorted_pred.begin()) + 1;
  };

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return truth[a] < truth[b]; });

  // Walk in increasing truth; each element is inverted with every earlier
  // element of strictly smaller truth and strictly larger prediction.
  Fenwick fenwick(sorted_pred.size());
  std::uint64_t inserted = 0, inversions = 0;
  for (std::size_t lo = 0; lo < n;) {
    std::size_t hi = lo;
    while (hi < n && truth[order[hi]] == truth[order[lo]]) ++hi;
    for (std::size_t j = lo; j < hi; ++j) inversions += inserted - fenwick.prefix(rank_of(pred[order[j]]));
    for (std::size_t j = lo; j < hi; ++j) fenwick.add(rank_of(pred[order[j]]));
    inserted += hi - lo;
    lo = hi;
  }
  return inversions;
}

MetricReport evaluate(std::span<const double> truth, std::span<const double> pred) {
  MetricReport r;
  r.n = truth.size();
  r.mae = mae(truth, pred);
  r.pearson = pearson(truth, pred);
  r.inverted_pairs = inverted_pairs(truth, pred);
  return r;
}

MetricReport evaluate_predictions(const std::vector<Prediction>& predictions) {
  std::vector<double> truth, pred;
  for (const Prediction& p : predictions) {
    if (!p.error.empty() || !p.true_rating) continue;
    truth.push_back(*p.true_rating);
    pred.push_back(p.predicted_rating);
  }
  return evaluate(truth, pred);
}

void write_metric_reports(const std::filesystem::path& path, const std::vector<LabelledReport>& rows) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  os << "label\tn\tmae\tpearson\tinverted_pairs\n";
  for (const auto& row : rows) {
    const MetricReport& r = row.report;
    os << row.label << '\t' << r.n << '\t' << num(r.mae) << '\t' << (r.pearson ? num(*r.pearson) : "NA") << '\t'
       << r.inverted_pairs << '\n';
  }
  if (!os) throw Error(ErrorKind::kIo, "failed writing " + path.string());
}

// --- parameter sweep --------------------------------------------------------

std::vector<GridPoint> parse_grid(std::string_view text, const HyperParams& base) {
  std::vector<double> mus{base.mu}, sigmas{base.sigma2};
  auto parse_list = [](std::string_view list, std::string_view axis) {
    std::vector<double> values;
    while (!list.empty()) {
      const auto comma = list.find(',');
      std::string_view item = list.substr(0, comma);
      while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
      while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
      double v = 0.0;
      auto res = std::from_chars(item.data(), item.data() + item.size(), v);
      if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size()) {
        throw Error(ErrorKind::kInvalidArgument, "grid: bad value '" + std::string(item) + "' for " + std::string(axis));
      }
      values.push_back(v);
      if (comma == std::string_view::npos) break;
      list.remove_prefix(comma + 1);
    }
    if (values.empty()) throw Error(ErrorKind::kInvalidArgument, "grid: empty list for " + std::string(axis));
    return values;
  };
  while (!text.empty()) {
    const auto semi = text.find(';');
    std::string_view part = text.substr(0, semi);
    const auto eq = part.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorKind::kInvalidArgument, "grid: expected axis=values");
    std::string_view axis = part.substr(0, eq);
    while (!axis.empty() && axis.front() == ' ') axis.remove_prefix(1);
    while (!axis.empty() && axis.back() == ' ') axis.remove_suffix(1);
    if (axis == "mu") {
      mus = parse_list(part.substr(eq + 1), axis);
    } else if (axis == "sigma2") {
      sigmas = parse_list(part.substr(eq + 1), axis);
    } else {
      throw Error(ErrorKind::kInvalidArgument, "grid: unknown axis '" + std::string(axis) + "'");
    }
    if (semi == std::string_view::npos) break;
    text.remove_prefix(semi + 1);
  }
  std::vector<GridPoint> grid;
  for (double mu : mus) {
    for (double s2 : sigmas) grid.push_back({mu, s2});
  }
  return grid;
}

SweepResult sweep_parameters(const Corpus& train, const Corpus& test, const std::vector<GridPoint>& grid,
                             const HyperParams& base, const TrainConfig& train_config,
                             const PredictConfig& predict_config, std::size_t jobs) {
  if (grid.empty()) throw Error(ErrorKind::kInvalidArgument, "sweep: empty grid");
  struct Outcome {
    std::optional<MetricReport> report;
    std::string error;
  };
  std::vector<Outcome> outcomes(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t g = next++; g < grid.size(); g = next++) {
      try {
        HyperParams hyper = base;
        hyper.mu = grid[g].mu;
        hyper.sigma2 = grid[g].sigma2;
        const TrainedModel model = tspra::train(train, hyper, train_config);
        const auto predictions = predict_batch(model, test, predict_config);
        outcomes[g].report = evaluate_predictions(predictions);
      } catch (const std::exception& e) {
        outcomes[g].error = e.what();
      }
    }
  };
  jobs = std::max<std::size_t>(1, std::min(jobs, grid.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SweepResult result;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (outcomes[g].report) {
      const bool recommended = grid[g].mu == 3.5 && grid[g].sigma2 == 0.08;
      result.rows.push_back({grid[g], *outcomes[g].report, recommended});
    } else {
      result.failures.push_back({grid[g], outcomes[g].error});
    }
  }
  return result;
}

void write_sweep_table(const std::filesystem::path& path, const SweepResult& result) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  os << "mu\tsigma2\tn\tmae\tpearson\tinverted_pairs\trecommended\n";
  for (const SweepRow& row : result.rows) {
    const MetricReport& r = row.report;
    os << num(row.point.mu) << '\t' << num(row.point.sigma2) << '\t' << r.n << '\t' << num(r.mae) << '\t'
       << (r.pearson ? num(*r.pearson) : "NA") << '\t' << r.inverted_pairs << '\t' << (row.recommended ? 1 : 0)
       << '\n';
  }
  if (!os) throw Error(ErrorKind::kIo, "failed writing " + path.string());
}

}  // namespace tspra
