#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tspra/corpus.hpp"
#include "tspra/model_core.hpp"
#include "tspra/predictor.hpp"
#include "tspra/trainer.hpp"

namespace tspra {

/// Mean absolute error. Throws Error(kInvalidArgument) on empty input or a
/// length mismatch.
double mae(std::span<const double> truth, std::span<const double> pred);

/// Sample Pearson correlation; nullopt when n < 2 or either list is constant.
/// Throws on a length mismatch.
std::optional<double> pearson(std::span<const double> truth, std::span<const double> pred);

/// Unordered pairs {i, j} with (truth_i - truth_j)(pred_i - pred_j) < 0.
/// Ties in either list never count. O(n log n).
std::uint64_t inverted_pairs(std::span<const double> truth, std::span<const double> pred);

struct MetricReport {
  std::size_t n = 0;
  double mae = 0.0;
  std::optional<double> pearson;
  std::uint64_t inverted_pairs = 0;
};

MetricReport evaluate(std::span<const double> truth, std::span<const double> pred);

/// Metrics over predictions that carry a true rating and no error.
MetricReport evaluate_predictions(const std::vector<Prediction>& predictions);

struct LabelledReport {
  std::string label;
  MetricReport report;
};

/// Tab-separated with a header; an undefined Pearson value is written as NA.
void write_metric_reports(const std::filesystem::path& path, const std::vector<LabelledReport>& rows);

// --- parameter sweep --------------------------------------------------------

struct GridPoint {
  double mu = 3.5;
  double sigma2 = 0.08;
};

/// Parses "mu=3.0,3.5;sigma2=0.04,0.08" into the cartesian product, mu
/// varying slowest. A missing axis takes the base value.
std::vector<GridPoint> parse_grid(std::string_view text, const HyperParams& base);

struct SweepRow {
  GridPoint point;
  MetricReport report;
  bool recommended = false;  // mu = 3.5, sigma2 = 0.08
};

struct SweepFailure {
  GridPoint point;
  std::string message;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepFailure> failures;
};

/// Trains on `train` and predicts `test` once per grid point, every point
/// sharing the seeds in the configs. Point failures are recorded and the
/// sweep continues. Points run on up to `jobs` threads; results keep grid order.
SweepResult sweep_parameters(const Corpus& train, const Corpus& test, const std::vector<GridPoint>& grid,
                             const HyperParams& base, const TrainConfig& train_config,
                             const PredictConfig& predict_config, std::size_t jobs = 1);

void write_sweep_table(const std::filesystem::path& path, const SweepResult& result);

}  // namespace tspra
