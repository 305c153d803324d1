#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nhad/labels.hpp"
#include "nhad/reputation.hpp"

namespace nhad {

struct SyntheticConfig {
  int n_communities = 10;
  double lambda = 100.0;          // Poisson mean of users per community
  double source_lambda = 100.0;   // Poisson mean of the source count
  int min_connections = 1;
  int max_connections = 10;
  double anomaly_fraction = 0.1;  // share of sources (and of active users) made anomalous
  double active_user_fraction = 1.0;
  double hard_share = 0.15;       // share of anomalous users given the hard profile
  std::uint64_t seed = 1;

  /// Throws InvalidConfig; anomaly_fraction is capped at 0.5.
  void validate() const;
};

/// One row of the labels file.
struct LinkLabel {
  std::string user_id;
  std::string source_id;
  bool anomaly = false;
  AnomalyClass cls = AnomalyClass::Benign;

  friend bool operator==(const LinkLabel&, const LinkLabel&) = default;
};

struct LabeledNetwork {
  Network network;
  std::vector<std::string> communities;
  std::vector<std::string> users;    // active users
  std::vector<std::string> sources;
  std::map<std::string, bool> source_anomalous;
  std::vector<ActivityRecord> records;
  std::vector<LinkLabel> links;
  GroundTruth ground_truth;
};

/// Labeled synthetic network; a pure function of the config (seed included).
///
/// Benign links carry low activations. Anomalous users are horizontal anomalies:
/// ordinary toward some sources and abusive toward injected anomalous sources.
///  - soft: k intrusive links (all properties near 1, spam share 0.55-0.7) beside
///    k clean links, k = 1 + Binomial(4, anomaly_fraction); lands in (safe, hard]
///    and heals once enough intrusive links are terminated.
///  - hard: 1-3 intrusive links, 1-2 flooding links (spam share ~1) and at most one
///    clean link; lands above the hard threshold.
LabeledNetwork generate(const SyntheticConfig& config);

/// Per-user truth derived from link labels (a user is anomalous if any link is).
GroundTruth ground_truth_from_links(const std::vector<LinkLabel>& links);

}  // namespace nhad
