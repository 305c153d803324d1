#pragma once

#include <span>
#include <string>

#include "nhad/fuzzy.hpp"
#include "nhad/reputation.hpp"

namespace nhad {

struct HealingThresholds {
  double safe = 0.5;      // at or below: safe
  double hard = 0.7;      // above: hard anomaly
  int max_warnings = 3;

  /// Throws InvalidConfig unless 0 < safe < hard <= 1 and max_warnings >= 1.
  void validate() const;

  friend bool operator==(const HealingThresholds&, const HealingThresholds&) = default;
};

struct CostBreakdown {
  double s_f_raw = 0.0;    // single-user healing cost on the unnormalised scale
  double s_f_user = 0.0;   // normalised per-user cost in [0,1]
  double c_g_crisp = 0.0;  // defuzzified gain
  double s_f_final = 0.0;  // s_f_user * c_g_crisp

  friend bool operator==(const CostBreakdown&, const CostBreakdown&) = default;
};

/// Healing cost of a whole community: sum_i exp(D_s(i)) + sqrt(mean_j k'_j^2).
double community_healing_cost(std::span<const ReputationState> states);

/// 0.5 * (exp(D_s) - 1) / (exp(0.5) - 1) + 0.5 * k'/K, clamped to [0,1].
double user_healing_cost(double d_s, std::size_t k_prime, std::size_t source_count);
double user_healing_cost(const ReputationState& state);

double final_cost(double s_f_user, double c_g_crisp);

/// Per-property maxima over a user's links; the fuzzy input for that user.
fuzzy::InputVector user_activations(const UserNode& node);

struct Assessment {
  ReputationState state;
  CostBreakdown costs;
};

/// Reputation state and full cost breakdown of one user. Requires at least one edge.
Assessment assess(const UserNode& node, const fuzzy::FuzzyInferenceSystem& fis);

struct WarningLedger {
  int warnings = 0;

  friend bool operator==(const WarningLedger&, const WarningLedger&) = default;
};

enum class RecoveryOutcome { Recovered, StillWarned };

struct RecoveryResult {
  RecoveryOutcome outcome = RecoveryOutcome::StillWarned;
  std::string removed_source;
  Assessment after;
};

/// Terminates the user's worst spam-flagged link (largest reputation contribution,
/// ties to the lowest source id), re-assesses and bumps the warning count.
///
/// Preconditions: the user is currently a soft anomaly and has warnings left.
/// Throws NoRemovableEdge, leaving graph and ledger untouched, when no spam-flagged
/// link remains. Callers must serialise recover calls per user.
RecoveryResult recover(std::string_view user_id, ReputationGraph& graph, WarningLedger& ledger,
                       const fuzzy::FuzzyInferenceSystem& fis, const HealingThresholds& thresholds);

}  // namespace nhad
