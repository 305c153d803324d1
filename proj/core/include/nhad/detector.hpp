#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nhad/fuzzy.hpp"
#include "nhad/healing.hpp"
#include "nhad/reputation.hpp"

namespace nhad {

enum class Band { Safe, SoftAnomaly, HardAnomaly, Recovered, Eliminated };

std::string_view to_string(Band band) noexcept;
Band band_from_string(std::string_view text);

enum class EliminationReason { None, HardAnomaly, WarningsExhausted };

std::string_view to_string(EliminationReason reason) noexcept;
EliminationReason elimination_reason_from_string(std::string_view text);

/// Three-band decision. A soft result with no warnings left becomes Eliminated.
Band classify(const CostBreakdown& costs, int warnings, const HealingThresholds& thresholds);

struct Verdict {
  std::string user_id;
  Band band = Band::Safe;
  CostBreakdown costs;
  int iteration = 0;  // iteration at which `band` was assigned
  int warnings = 0;
  bool ever_flagged = false;  // classified soft or hard at least once
  EliminationReason reason = EliminationReason::None;
  std::vector<std::string> terminated_sources;

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

struct IterationSnapshot {
  int iteration = 0;
  std::size_t safe = 0;
  std::size_t soft = 0;
  std::size_t hard = 0;
  std::size_t recovered = 0;
  std::size_t eliminated = 0;
  double mean_s_f_final = 0.0;  // over users evaluated this iteration

  friend bool operator==(const IterationSnapshot&, const IterationSnapshot&) = default;
};

inline constexpr int kDefaultIterationBudget = 50;

struct DetectionConfig {
  HealingThresholds thresholds;
  int iteration_budget = kDefaultIterationBudget;
  std::uint64_t seed = 0;
  std::set<std::string, std::less<>> flagged_sources;

  void validate() const;
};

struct DetectionReport {
  std::vector<Verdict> verdicts;  // sorted by user id
  int iterations_used = 0;
  int iteration_budget = 0;
  bool converged = false;
  std::vector<IterationSnapshot> iterations;
  std::map<std::string, double> community_costs;  // unnormalised healing cost per community
  std::uint64_t seed = 0;
  std::map<std::string, std::string> config;  // echo of the run configuration

  const Verdict* find(std::string_view user_id) const;

  friend bool operator==(const DetectionReport&, const DetectionReport&) = default;
};

/// Iterates build -> cost -> classify -> recover/eliminate until no verdict changes
/// or the budget runs out (then `converged` is false). Throws on configuration
/// errors such as AllRulesSilent.
DetectionReport run_detection(std::span<const ActivityRecord> records, const Network& network,
                              const fuzzy::FuzzyInferenceSystem& fis, const DetectionConfig& config);
DetectionReport run_detection(std::span<const ActivityRecord> records,
                              const fuzzy::FuzzyInferenceSystem& fis, const DetectionConfig& config);

}  // namespace nhad
