#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "nhad/detector.hpp"
#include "nhad/labels.hpp"

namespace nhad {

/// Accuracy below this counts as an approach failure.
inline constexpr double kFailureAccuracy = 0.95;

/// Binary confusion counts. Positive class = anomaly.
struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }

  friend bool operator==(const Confusion&, const Confusion&) = default;
};

/// A user is predicted anomalous once the detector has flagged it: hard anomalies,
/// eliminated users, unresolved soft anomalies and soft anomalies that recovered.
bool predicted_positive(const Verdict& v) noexcept;

/// Throws MissingVerdict when a labeled user has no verdict or a verdict has no label.
Confusion confusion(const GroundTruth& truth, std::span<const Verdict> verdicts);

/// Ratios are nullopt when their denominator is zero.
struct Scores {
  std::optional<double> accuracy;
  std::optional<double> detection_rate;
  std::optional<double> false_positive_rate;
  std::optional<double> precision;
  std::optional<double> f_score;

  friend bool operator==(const Scores&, const Scores&) = default;
};

Scores scores(const Confusion& c);

double filtering_rate(int iterations_used, int iteration_budget);
double filtering_rate(const DetectionReport& report);

/// 100 * filtering_rate * detected_fraction; lower is better.
double convergence_value(double filtering_rate, double detected_fraction);

/// 100 * recovered / ever-flagged, nullopt when nobody was flagged.
std::optional<double> recovered_pct(std::span<const Verdict> verdicts);
/// Same, restricted to users whose ground-truth class is `cls`.
std::optional<double> recovered_pct(std::span<const Verdict> verdicts, const GroundTruth& truth,
                                    AnomalyClass cls);

struct RunMetrics {
  Confusion confusion;
  Scores scores;
  double filtering_rate = 0.0;
  std::optional<double> convergence_value;
  std::optional<double> users_recovered_pct;
  std::optional<double> soft_recovered_pct;
  bool failed = false;

  friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

bool failure_flag(const RunMetrics& m);

RunMetrics evaluate_run(const GroundTruth& truth, const DetectionReport& report);

/// Means over a batch; each mean skips runs where the metric is undefined.
struct BatchSummary {
  std::size_t runs = 0;
  std::size_t failures = 0;
  std::optional<double> accuracy;
  std::optional<double> detection_rate;
  std::optional<double> false_positive_rate;
  std::optional<double> precision;
  std::optional<double> f_score;
  std::optional<double> filtering_rate;
  std::optional<double> convergence_value;
  std::optional<double> users_recovered_pct;
  std::optional<double> soft_recovered_pct;
};

BatchSummary summarize(std::span<const RunMetrics> runs);

}  // namespace nhad
