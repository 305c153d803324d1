#include "nhad/healing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nhad/error.hpp"

namespace nhad {

namespace {

const double kExpSaturation = std::exp(kSignificantDifferenceThreshold) - 1.0;

bool in_unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

}  // namespace

void HealingThresholds::validate() const {
  if (!(safe > 0.0 && safe < hard && hard <= 1.0)) {
    throw InvalidConfig("thresholds must satisfy 0 < safe < hard <= 1");
  }
  if (max_warnings < 1) throw InvalidConfig("max_warnings must be at least 1");
}

double community_healing_cost(std::span<const ReputationState> states) {
  if (states.empty()) throw EmptyCommunity("community healing cost needs at least one user");
  double deviation_term = 0.0;
  double spam_sq = 0.0;
  for (const auto& s : states) {
    deviation_term += std::exp(significant_difference(s));
    spam_sq += static_cast<double>(s.k_prime) * static_cast<double>(s.k_prime);
  }
  return deviation_term + std::sqrt(spam_sq / static_cast<double>(states.size()));
}

double user_healing_cost(double d_s, std::size_t k_prime, std::size_t source_count) {
  if (source_count == 0) throw EmptyHistory("user has no sources");
  if (k_prime > source_count) throw PreconditionError("k' exceeds the source count");
  if (!(d_s >= 0.0)) throw PreconditionError("significant difference must be non-negative");
  const double deviation = (std::exp(d_s) - 1.0) / kExpSaturation;
  const double spam = static_cast<double>(k_prime) / static_cast<double>(source_count);
  return std::clamp(0.5 * deviation + 0.5 * spam, 0.0, 1.0);
}

double user_healing_cost(const ReputationState& state) {
  return user_healing_cost(significant_difference(state), state.k_prime, state.source_count);
}

double final_cost(double s_f_user, double c_g_crisp) {
  if (!in_unit(s_f_user) || !in_unit(c_g_crisp)) {
    throw PreconditionError("final cost factors must lie in [0,1]");
  }
  return s_f_user * c_g_crisp;
}

fuzzy::InputVector user_activations(const UserNode& node) {
  fuzzy::InputVector out{};
  for (const auto& e : node.edges) {
    for (std::size_t d = 0; d < kPropertyCount; ++d) out[d] = std::max(out[d], e.activations[d]);
  }
  return out;
}

Assessment assess(const UserNode& node, const fuzzy::FuzzyInferenceSystem& fis) {
  Assessment a;
  a.state = make_state(node);
  const auto& s = a.state;
  a.costs.s_f_raw = std::exp(significant_difference(s)) + static_cast<double>(s.k_prime);
  a.costs.s_f_user = user_healing_cost(s);
  a.costs.c_g_crisp = fis.crisp(user_activations(node));
  a.costs.s_f_final = final_cost(a.costs.s_f_user, a.costs.c_g_crisp);
  return a;
}

RecoveryResult recover(std::string_view user_id, ReputationGraph& graph, WarningLedger& ledger,
                       const fuzzy::FuzzyInferenceSystem& fis, const HealingThresholds& th) {
  const UserNode* node = graph.find(user_id);
  if (!node) throw UnknownUser("unknown user " + std::string(user_id));
  if (ledger.warnings >= th.max_warnings) {
    throw PreconditionError("user " + std::string(user_id) + " has exhausted its warnings");
  }
  if (node->edges.empty()) throw NoRemovableEdge("user " + std::string(user_id) + " has no links");
  const auto before = assess(*node, fis);
  if (!(before.costs.s_f_final > th.safe && before.costs.s_f_final <= th.hard)) {
    throw PreconditionError("user " + std::string(user_id) + " is not a soft anomaly");
  }

  const Edge* worst = nullptr;
  for (const auto& e : node->edges) {
    if (!e.spam_flagged) continue;
    // Edges are sorted by source id, so strict '>' keeps the lowest id on ties.
    if (!worst || e.gain > worst->gain) worst = &e;
  }
  if (!worst) {
    throw NoRemovableEdge("user " + std::string(user_id) + " has no spam-flagged sources left");
  }

  RecoveryResult result;
  result.removed_source = worst->source_id;
  graph.remove_edge(user_id, result.removed_source);
  ++ledger.warnings;

  node = graph.find(user_id);
  if (node->edges.empty()) {
    // Every link was terminated; nothing left to cost.
    result.after.state = make_state(*node);
    result.after.costs = CostBreakdown{};
  } else {
    result.after = assess(*node, fis);
  }
  result.outcome = result.after.costs.s_f_final <= th.safe ? RecoveryOutcome::Recovered
                                                           : RecoveryOutcome::StillWarned;
  return result;
}

}  // namespace nhad
