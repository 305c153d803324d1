#include "nhad/detector.hpp"

#include <algorithm>
#include <optional>

#include "nhad/error.hpp"

namespace nhad {

namespace {

struct TrackedUser {
  Verdict verdict;
  WarningLedger ledger;
  bool active = true;
  std::vector<double> checkpoint;  // reputation history saved on the last safe pass
};

std::string format_double(double v) {
  std::string s = std::to_string(v);
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

std::string_view to_string(Band band) noexcept {
  switch (band) {
    case Band::Safe: return "safe";
    case Band::SoftAnomaly: return "soft_anomaly";
    case Band::HardAnomaly: return "hard_anomaly";
    case Band::Recovered: return "recovered";
    case Band::Eliminated: return "eliminated";
  }
  return "";
}

Band band_from_string(std::string_view text) {
  for (Band b : {Band::Safe, Band::SoftAnomaly, Band::HardAnomaly, Band::Recovered, Band::Eliminated}) {
    if (to_string(b) == text) return b;
  }
  throw ParseError("unknown band '" + std::string(text) + "'");
}

std::string_view to_string(EliminationReason reason) noexcept {
  switch (reason) {
    case EliminationReason::None: return "none";
    case EliminationReason::HardAnomaly: return "hard_anomaly";
    case EliminationReason::WarningsExhausted: return "warnings_exhausted";
  }
  return "";
}

EliminationReason elimination_reason_from_string(std::string_view text) {
  for (auto r : {EliminationReason::None, EliminationReason::HardAnomaly,
                 EliminationReason::WarningsExhausted}) {
    if (to_string(r) == text) return r;
  }
  throw ParseError("unknown elimination reason '" + std::string(text) + "'");
}

Band classify(const CostBreakdown& costs, int warnings, const HealingThresholds& th) {
  if (costs.s_f_final > th.hard) return Band::HardAnomaly;
  if (costs.s_f_final > th.safe) {
    return warnings >= th.max_warnings ? Band::Eliminated : Band::SoftAnomaly;
  }
  return Band::Safe;
}

void DetectionConfig::validate() const {
  thresholds.validate();
  if (iteration_budget < 1) throw InvalidConfig("iteration budget must be at least 1");
}

const Verdict* DetectionReport::find(std::string_view user_id) const {
  auto it = std::lower_bound(verdicts.begin(), verdicts.end(), user_id,
                             [](const Verdict& v, std::string_view id) { return v.user_id < id; });
  return (it != verdicts.end() && it->user_id == user_id) ? &*it : nullptr;
}

DetectionReport run_detection(std::span<const ActivityRecord> records,
                              const fuzzy::FuzzyInferenceSystem& fis, const DetectionConfig& config) {
  return run_detection(records, Network::from_records(records), fis, config);
}

DetectionReport run_detection(std::span<const ActivityRecord> records, const Network& network,
                              const fuzzy::FuzzyInferenceSystem& fis, const DetectionConfig& config) {
  config.validate();
  if (records.empty()) throw PreconditionError("detection needs at least one activity record");
  const auto& th = config.thresholds;

  ReputationGraph graph = build_reputation_graph(records, network, config.flagged_sources);
  const auto nodes = graph.users();

  std::vector<TrackedUser> users(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) users[i].verdict.user_id = nodes[i].user_id;

  DetectionReport report;
  report.iteration_budget = config.iteration_budget;
  report.seed = config.seed;
  report.config = {
      {"safe", format_double(th.safe)},
      {"hard", format_double(th.hard)},
      {"max_warnings", std::to_string(th.max_warnings)},
      {"budget", std::to_string(config.iteration_budget)},
      {"seed", std::to_string(config.seed)},
      {"fis_samples", std::to_string(fis.samples())},
      {"fis_rules", std::to_string(fis.rules().size())},
      {"flagged_sources", std::to_string(config.flagged_sources.size())},
  };

  for (int it = 1; it <= config.iteration_budget; ++it) {
    // Evaluate: users are independent, nothing here touches shared state.
    std::vector<std::optional<Assessment>> assessed(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (users[i].active && !graph.users()[i].edges.empty()) {
        assessed[i] = assess(graph.users()[i], fis);
      }
    }

    if (it == 1) {
      std::map<std::string, std::vector<ReputationState>> by_community;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (assessed[i]) by_community[nodes[i].community_id].push_back(assessed[i]->state);
      }
      for (const auto& [community, states] : by_community) {
        report.community_costs[community] = community_healing_cost(states);
      }
    }

    // Commit: serial, one user at a time.
    bool changed = false;
    double cost_sum = 0.0;
    std::size_t evaluated = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      auto& user = users[i];
      if (!user.active) continue;
      auto& v = user.verdict;
      const Band previous = v.band;
      Band next = previous;

      if (!assessed[i]) {
        // All links terminated by earlier recoveries.
        next = previous == Band::Recovered ? Band::Recovered : Band::Safe;
      } else {
        const Assessment& a = *assessed[i];
        cost_sum += a.costs.s_f_final;
        ++evaluated;
        v.costs = a.costs;
        switch (classify(a.costs, user.ledger.warnings, th)) {
          case Band::HardAnomaly:
            v.ever_flagged = true;
            v.reason = EliminationReason::HardAnomaly;
            next = Band::Eliminated;
            user.active = false;
            break;
          case Band::Eliminated:
            v.reason = EliminationReason::WarningsExhausted;
            next = Band::Eliminated;
            user.active = false;
            break;
          case Band::SoftAnomaly: {
            v.ever_flagged = true;
            changed = true;
            try {
              auto r = recover(v.user_id, graph, user.ledger, fis, th);
              v.terminated_sources.push_back(r.removed_source);
              v.costs = r.after.costs;
              next = r.outcome == RecoveryOutcome::Recovered ? Band::Recovered : Band::SoftAnomaly;
            } catch (const NoRemovableEdge&) {
              // Nothing left to terminate: the warning counts as ignored.
              ++user.ledger.warnings;
              next = Band::SoftAnomaly;
            }
            break;
          }
          case Band::Safe:
          case Band::Recovered:
            next = previous == Band::Recovered ? Band::Recovered : Band::Safe;
            user.checkpoint = a.state.rg_history;
            break;
        }
      }
      v.warnings = user.ledger.warnings;
      if (next != previous) {
        v.band = next;
        v.iteration = it;
        changed = true;
      } else if (v.iteration == 0) {
        v.iteration = it;
      }
    }

    IterationSnapshot snap;
    snap.iteration = it;
    snap.mean_s_f_final = evaluated ? cost_sum / static_cast<double>(evaluated) : 0.0;
    for (const auto& u : users) {
      switch (u.verdict.band) {
        case Band::Safe: ++snap.safe; break;
        case Band::SoftAnomaly: ++snap.soft; break;
        case Band::HardAnomaly: ++snap.hard; break;
        case Band::Recovered: ++snap.recovered; break;
        case Band::Eliminated:
          ++snap.eliminated;
          if (u.verdict.reason == EliminationReason::HardAnomaly) ++snap.hard;
          break;
      }
    }
    report.iterations.push_back(snap);
    report.iterations_used = it;
    if (!changed) {
      report.converged = true;
      break;
    }
  }

  report.verdicts.reserve(users.size());
  for (auto& u : users) report.verdicts.push_back(std::move(u.verdict));
  return report;
}

}  // namespace nhad
