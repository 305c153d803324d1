#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nhad/datagen.hpp"
#include "nhad/healing.hpp"
#include "nhad/ingest.hpp"
#include "nhad/metrics.hpp"

namespace nhad::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNotConverged = 2 };

struct DetectOptions {
  std::optional<std::filesystem::path> activity;
  std::optional<std::filesystem::path> traffic;
  std::optional<std::filesystem::path> mapping;
  std::optional<std::filesystem::path> labels;
  std::optional<std::filesystem::path> rules;
  std::size_t samples = fuzzy::kDefaultSamples;
  HealingThresholds thresholds;
  int budget = kDefaultIterationBudget;
  std::uint64_t seed = 0;
  std::filesystem::path out = ".";
  ReportFormat format = ReportFormat::Json;
};

struct EvaluateOptions {
  SyntheticConfig synthetic;
  int runs = 20;
  std::optional<std::filesystem::path> rules;
  std::size_t samples = fuzzy::kDefaultSamples;
  HealingThresholds thresholds;
  int budget = kDefaultIterationBudget;
  std::filesystem::path out = ".";
  ReportFormat format = ReportFormat::Csv;
};

struct RunRow {
  int run = 0;
  std::uint64_t seed = 0;
  RunMetrics metrics;
};

struct EvaluateResult {
  std::vector<RunRow> rows;
  BatchSummary summary;
};

/// Writes activity.csv and labels.csv under `out`.
void cmd_generate(const SyntheticConfig& config, const std::filesystem::path& out);

/// Writes report.<format> under `out`; returns the report's exit code.
int cmd_detect(const DetectOptions& options, std::ostream& log);

/// Runs generate + detect `runs` times with seeds seed, seed+1, ... and writes
/// summary.<format> under `out`. Throws InvalidConfig when runs < 1.
EvaluateResult cmd_evaluate(const EvaluateOptions& options);

/// Per-run and mean rows. Identical input gives byte-identical text.
std::string format_summary_csv(const EvaluateResult& result);
std::string format_summary_json(const EvaluateResult& result);

/// Full command-line entry point.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nhad::cli
