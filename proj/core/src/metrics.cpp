#include "nhad/metrics.hpp"

#include "nhad/error.hpp"

namespace nhad {

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

template <typename Get>
std::optional<double> mean_of(std::span<const RunMetrics> runs, Get get) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : runs) {
    if (std::optional<double> v = get(r)) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace

bool predicted_positive(const Verdict& v) noexcept {
  switch (v.band) {
    case Band::HardAnomaly:
    case Band::Eliminated:
    case Band::SoftAnomaly:
    case Band::Recovered:
      return true;
    case Band::Safe:
      return false;
  }
  return false;
}

Confusion confusion(const GroundTruth& truth, std::span<const Verdict> verdicts) {
  Confusion c;
  std::size_t matched = 0;
  for (const auto& v : verdicts) {
    auto it = truth.find(v.user_id);
    if (it == truth.end()) throw MissingVerdict("verdict for unlabeled user " + v.user_id);
    ++matched;
    const bool actual = it->second.anomaly;
    const bool predicted = predicted_positive(v);
    if (actual && predicted) ++c.tp;
    else if (actual) ++c.fn;
    else if (predicted) ++c.fp;
    else ++c.tn;
  }
  if (matched != truth.size()) {
    throw MissingVerdict(std::to_string(truth.size() - matched) + " labeled users have no verdict");
  }
  return c;
}

Scores scores(const Confusion& c) {
  Scores s;
  s.accuracy = ratio(c.tp + c.tn, c.total());
  s.detection_rate = ratio(c.tp, c.tp + c.fn);
  s.false_positive_rate = ratio(c.fp, c.fp + c.tn);
  s.precision = ratio(c.tp, c.tp + c.fp);
  if (s.precision && s.detection_rate && (*s.precision + *s.detection_rate) > 0.0) {
    s.f_score = 2.0 * *s.precision * *s.detection_rate / (*s.precision + *s.detection_rate);
  }
  return s;
}

double filtering_rate(int iterations_used, int iteration_budget) {
  if (iteration_budget <= 0) throw PreconditionError("iteration budget must be positive");
  return static_cast<double>(iterations_used) / static_cast<double>(iteration_budget);
}

double filtering_rate(const DetectionReport& report) {
  return filtering_rate(report.iterations_used, report.iteration_budget);
}

double convergence_value(double filtering, double detected_fraction) {
  if (!(filtering >= 0.0 && filtering <= 1.0 && detected_fraction >= 0.0 && detected_fraction <= 1.0)) {
    throw PreconditionError("convergence inputs must lie in [0,1]");
  }
  return 100.0 * filtering * detected_fraction;
}

std::optional<double> recovered_pct(std::span<const Verdict> verdicts) {
  std::size_t flagged = 0;
  std::size_t recovered = 0;
  for (const auto& v : verdicts) {
    if (!v.ever_flagged) continue;
    ++flagged;
    if (v.band == Band::Recovered) ++recovered;
  }
  auto r = ratio(recovered, flagged);
  if (r) *r *= 100.0;
  return r;
}

std::optional<double> recovered_pct(std::span<const Verdict> verdicts, const GroundTruth& truth,
                                    AnomalyClass cls) {
  std::vector<Verdict> subset;
  for (const auto& v : verdicts) {
    auto it = truth.find(v.user_id);
    if (it != truth.end() && it->second.cls == cls) subset.push_back(v);
  }
  return recovered_pct(subset);
}

bool failure_flag(const RunMetrics& m) {
  if (!m.scores.accuracy) throw PreconditionError("accuracy is undefined");
  return *m.scores.accuracy < kFailureAccuracy;
}

RunMetrics evaluate_run(const GroundTruth& truth, const DetectionReport& report) {
  RunMetrics m;
  m.confusion = confusion(truth, report.verdicts);
  m.scores = scores(m.confusion);
  m.filtering_rate = filtering_rate(report);
  if (m.scores.detection_rate) m.convergence_value = convergence_value(m.filtering_rate, *m.scores.detection_rate);
  m.users_recovered_pct = recovered_pct(report.verdicts);
  m.soft_recovered_pct = recovered_pct(report.verdicts, truth, AnomalyClass::Soft);
  m.failed = m.scores.accuracy ? failure_flag(m) : false;
  return m;
}

BatchSummary summarize(std::span<const RunMetrics> runs) {
  BatchSummary s;
  s.runs = runs.size();
  for (const auto& r : runs) s.failures += r.failed ? 1 : 0;
  s.accuracy = mean_of(runs, [](const RunMetrics& r) { return r.scores.accuracy; });
  s.detection_rate = mean_of(runs, [](const RunMetrics& r) { return r.scores.detection_rate; });
  s.false_positive_rate = mean_of(runs, [](const RunMetrics& r) { return r.scores.false_positive_rate; });
  s.precision = mean_of(runs, [](const RunMetrics& r) { return r.scores.precision; });
  s.f_score = mean_of(runs, [](const RunMetrics& r) { return r.scores.f_score; });
  s.filtering_rate = mean_of(runs, [](const RunMetrics& r) { return std::optional<double>(r.filtering_rate); });
  s.convergence_value = mean_of(runs, [](const RunMetrics& r) { return r.convergence_value; });
  s.users_recovered_pct = mean_of(runs, [](const RunMetrics& r) { return r.users_recovered_pct; });
  s.soft_recovered_pct = mean_of(runs, [](const RunMetrics& r) { return r.soft_recovered_pct; });
  return s;
}

}  // namespace nhad
