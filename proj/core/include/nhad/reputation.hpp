#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nhad {

inline constexpr std::size_t kPropertyCount = 5;

/// Trust properties in priority order.
enum class TrustProperty : std::uint8_t {
  UnauthorizedSource = 0,  // P1
  SpamHits = 1,            // P2
  SensitiveWords = 2,      // P3
  OutDegree = 3,           // P4
  SingleSourceExcess = 4,  // P5
};

inline constexpr std::array<double, kPropertyCount> kTrustScores{1.0, 0.9, 0.8, 0.7, 0.6};
inline constexpr double kTrustScoreSum = 4.0;
/// Above this significant difference a user is a possible anomaly.
inline constexpr double kSignificantDifferenceThreshold = 0.5;
/// Spam fraction above which a source counts toward k'.
inline constexpr double kSpamSourceFraction = 0.5;

std::string_view property_description(TrustProperty p) noexcept;

using PropertyVector = std::array<double, kPropertyCount>;

struct ActivityRecord {
  std::string user_id;
  std::string community_id;
  std::string source_id;
  std::uint64_t hits_other = 0;
  std::uint64_t hits_same = 0;
  std::uint64_t spam_requests = 0;   // eta1
  std::uint64_t total_requests = 0;  // eta2
  PropertyVector activations{};

  friend bool operator==(const ActivityRecord&, const ActivityRecord&) = default;
};

/// Throws PreconditionError when counts or activations break the record invariants.
void validate(const ActivityRecord& rec);

/// Community membership of every known user.
class Network {
 public:
  Network() = default;

  /// Users and communities as they appear in the records. Throws PreconditionError
  /// if a user is listed under two communities.
  static Network from_records(std::span<const ActivityRecord> records);

  void add_user(const std::string& user_id, const std::string& community_id);
  void add_community(const std::string& community_id);

  bool has_user(std::string_view user_id) const;
  bool has_community(std::string_view community_id) const;
  const std::string& community_of(std::string_view user_id) const;
  std::size_t community_size(std::string_view community_id) const;
  std::size_t user_count() const noexcept { return user_community_.size(); }
  std::vector<std::string> communities() const;

 private:
  std::map<std::string, std::string, std::less<>> user_community_;
  std::map<std::string, std::size_t, std::less<>> community_sizes_;
};

/// Users outside the user's community divided by users inside it.
double gamma_for(std::string_view user_id, const Network& network);

/// H_r * gamma * (1 - eta1/eta2) before clamping.
double connectivity_constant_raw(const ActivityRecord& rec, double gamma);
/// Raw connectivity clamped to [0,1].
double connectivity_constant(const ActivityRecord& rec, double gamma);

/// Sum of per-property connectivity times trust score, normalised by the score sum.
double reputation_gain(const PropertyVector& connectivity);

double significant_difference(std::span<const double> history);

struct Edge {
  std::string source_id;
  std::uint64_t hits_other = 0;
  std::uint64_t hits_same = 0;
  std::uint64_t spam_requests = 0;
  std::uint64_t total_requests = 0;
  PropertyVector activations{};    // merged by per-property maximum
  double theta_raw = 0.0;
  double theta = 0.0;
  PropertyVector contributions{};  // theta * activation_d * trust score_d
  double gain = 0.0;               // reputation gain of this link
  bool spam_flagged = false;

  double spam_fraction() const noexcept;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct UserNode {
  std::string user_id;
  std::string community_id;
  double gamma = 0.0;
  std::vector<Edge> edges;  // sorted by source id

  friend bool operator==(const UserNode&, const UserNode&) = default;
};

/// Bipartite user -> source graph. A missing edge is a missing link.
class ReputationGraph {
 public:
  std::span<const UserNode> users() const noexcept { return users_; }
  const UserNode* find(std::string_view user_id) const;
  std::size_t edge_count() const noexcept;

  /// Drops one user -> source link. Returns false if it did not exist.
  bool remove_edge(std::string_view user_id, std::string_view source_id);

  friend bool operator==(const ReputationGraph&, const ReputationGraph&) = default;

 private:
  friend ReputationGraph build_reputation_graph(std::span<const ActivityRecord>, const Network&,
                                                const std::set<std::string, std::less<>>&);
  UserNode* find_mutable(std::string_view user_id);

  std::vector<UserNode> users_;  // sorted by user id
};

/// One edge per distinct (user, source); duplicate records have their counters summed
/// before the connectivity constant is computed. `flagged_sources` are always spam sources.
ReputationGraph build_reputation_graph(std::span<const ActivityRecord> records, const Network& network,
                                       const std::set<std::string, std::less<>>& flagged_sources = {});

struct ReputationState {
  std::string user_id;
  std::vector<double> rg_history;  // one reputation gain per source
  double rg_mean = 0.0;
  double d_s = 0.0;
  std::size_t k_prime = 0;
  std::size_t source_count = 0;  // K
  std::vector<double> archive;   // last checkpointed history

  friend bool operator==(const ReputationState&, const ReputationState&) = default;
};

ReputationState make_state(const UserNode& node);
double significant_difference(const ReputationState& state);

}  // namespace nhad
