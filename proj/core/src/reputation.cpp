#include "nhad/reputation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nhad/error.hpp"

namespace nhad {

std::string_view property_description(TrustProperty p) noexcept {
  switch (p) {
    case TrustProperty::UnauthorizedSource: return "visits to unauthorized sources";
    case TrustProperty::SpamHits: return "hits on spam content";
    case TrustProperty::SensitiveWords: return "use of highly sensitive words";
    case TrustProperty::OutDegree: return "out-degree (requests generated)";
    case TrustProperty::SingleSourceExcess: return "excess activity on a single source";
  }
  return "";
}

void validate(const ActivityRecord& rec) {
  if (rec.user_id.empty() || rec.community_id.empty() || rec.source_id.empty()) {
    throw PreconditionError("record has an empty identifier");
  }
  if (rec.spam_requests > rec.total_requests) {
    throw PreconditionError("spam requests exceed total requests for " + rec.user_id + "->" +
                            rec.source_id);
  }
  for (double a : rec.activations) {
    if (!std::isfinite(a) || a < 0.0 || a > 1.0) {
      throw PreconditionError("activation outside [0,1] for " + rec.user_id + "->" + rec.source_id);
    }
  }
}

Network Network::from_records(std::span<const ActivityRecord> records) {
  Network net;
  for (const auto& rec : records) net.add_user(rec.user_id, rec.community_id);
  return net;
}

void Network::add_user(const std::string& user_id, const std::string& community_id) {
  auto [it, inserted] = user_community_.try_emplace(user_id, community_id);
  if (!inserted) {
    if (it->second != community_id) {
      throw PreconditionError("user " + user_id + " belongs to two communities");
    }
    return;
  }
  ++community_sizes_[community_id];
}

void Network::add_community(const std::string& community_id) { community_sizes_.try_emplace(community_id, 0); }

bool Network::has_user(std::string_view user_id) const { return user_community_.contains(user_id); }

bool Network::has_community(std::string_view community_id) const {
  return community_sizes_.contains(community_id);
}

const std::string& Network::community_of(std::string_view user_id) const {
  auto it = user_community_.find(user_id);
  if (it == user_community_.end()) throw UnknownUser("unknown user " + std::string(user_id));
  return it->second;
}

std::size_t Network::community_size(std::string_view community_id) const {
  auto it = community_sizes_.find(community_id);
  if (it == community_sizes_.end()) {
    throw UnknownCommunity("unknown community " + std::string(community_id));
  }
  return it->second;
}

std::vector<std::string> Network::communities() const {
  std::vector<std::string> out;
  out.reserve(community_sizes_.size());
  for (const auto& [id, size] : community_sizes_) out.push_back(id);
  return out;
}

double gamma_for(std::string_view user_id, const Network& network) {
  const auto& community = network.community_of(user_id);
  const std::size_t inside = network.community_size(community);
  if (inside == 0) throw EmptyCommunity("community " + community + " has no members");
  const std::size_t outside = network.user_count() - inside;
  return static_cast<double>(outside) / static_cast<double>(inside);
}

double connectivity_constant_raw(const ActivityRecord& rec, double gamma) {
  if (!(gamma >= 0.0)) throw PreconditionError("gamma must be non-negative");
  const double hit_ratio =
      static_cast<double>(rec.hits_other) / static_cast<double>(std::max<std::uint64_t>(rec.hits_same, 1));
  const double spam = rec.total_requests == 0
                          ? 0.0
                          : static_cast<double>(rec.spam_requests) / static_cast<double>(rec.total_requests);
  return hit_ratio * gamma * (1.0 - spam);
}

double connectivity_constant(const ActivityRecord& rec, double gamma) {
  return std::clamp(connectivity_constant_raw(rec, gamma), 0.0, 1.0);
}

double reputation_gain(const PropertyVector& connectivity) {
  double sum = 0.0;
  for (std::size_t d = 0; d < kPropertyCount; ++d) sum += connectivity[d] * kTrustScores[d];
  return sum / kTrustScoreSum;
}

double significant_difference(std::span<const double> history) {
  if (history.empty()) throw EmptyHistory("no reputation history");
  const double n = static_cast<double>(history.size());
  const double mean = std::accumulate(history.begin(), history.end(), 0.0) / n;
  double sq = 0.0;
  for (double v : history) sq += (v - mean) * (v - mean);
  return std::sqrt(sq / n);
}

double Edge::spam_fraction() const noexcept {
  return total_requests == 0 ? 0.0 : static_cast<double>(spam_requests) / static_cast<double>(total_requests);
}

const UserNode* ReputationGraph::find(std::string_view user_id) const {
  auto it = std::lower_bound(users_.begin(), users_.end(), user_id,
                             [](const UserNode& u, std::string_view id) { return u.user_id < id; });
  return (it != users_.end() && it->user_id == user_id) ? &*it : nullptr;
}

UserNode* ReputationGraph::find_mutable(std::string_view user_id) {
  return const_cast<UserNode*>(std::as_const(*this).find(user_id));
}

std::size_t ReputationGraph::edge_count() const noexcept {
  std::size_t n = 0;
  for (const auto& u : users_) n += u.edges.size();
  return n;
}

bool ReputationGraph::remove_edge(std::string_view user_id, std::string_view source_id) {
  UserNode* node = find_mutable(user_id);
  if (!node) return false;
  auto it = std::find_if(node->edges.begin(), node->edges.end(),
                         [&](const Edge& e) { return e.source_id == source_id; });
  if (it == node->edges.end()) return false;
  node->edges.erase(it);
  return true;
}

ReputationGraph build_reputation_graph(std::span<const ActivityRecord> records, const Network& network,
                                       const std::set<std::string, std::less<>>& flagged_sources) {
  // (user, source) -> merged counters; std::map keeps construction O(E log E) and order-free.
  std::map<std::pair<std::string, std::string>, ActivityRecord> merged;
  for (const auto& rec : records) {
    validate(rec);
    if (!network.has_community(rec.community_id)) {
      throw UnknownCommunity("unknown community " + rec.community_id);
    }
    if (!network.has_user(rec.user_id)) throw UnknownUser("unknown user " + rec.user_id);
    if (network.community_of(rec.user_id) != rec.community_id) {
      throw UnknownCommunity("user " + rec.user_id + " is not a member of " + rec.community_id);
    }
    auto [it, inserted] = merged.try_emplace({rec.user_id, rec.source_id}, rec);
    if (inserted) continue;
    auto& acc = it->second;
    acc.hits_other += rec.hits_other;
    acc.hits_same += rec.hits_same;
    acc.spam_requests += rec.spam_requests;
    acc.total_requests += rec.total_requests;
    for (std::size_t d = 0; d < kPropertyCount; ++d) {
      acc.activations[d] = std::max(acc.activations[d], rec.activations[d]);
    }
  }

  ReputationGraph graph;
  for (const auto& [key, rec] : merged) {
    if (graph.users_.empty() || graph.users_.back().user_id != key.first) {
      UserNode node;
      node.user_id = rec.user_id;
      node.community_id = rec.community_id;
      node.gamma = gamma_for(rec.user_id, network);
      graph.users_.push_back(std::move(node));
    }
    UserNode& node = graph.users_.back();
    Edge e;
    e.source_id = rec.source_id;
    e.hits_other = rec.hits_other;
    e.hits_same = rec.hits_same;
    e.spam_requests = rec.spam_requests;
    e.total_requests = rec.total_requests;
    e.activations = rec.activations;
    e.theta_raw = connectivity_constant_raw(rec, node.gamma);
    e.theta = std::clamp(e.theta_raw, 0.0, 1.0);
    PropertyVector per_property{};
    for (std::size_t d = 0; d < kPropertyCount; ++d) {
      per_property[d] = e.theta * rec.activations[d];
      e.contributions[d] = per_property[d] * kTrustScores[d];
    }
    e.gain = reputation_gain(per_property);
    e.spam_flagged = e.spam_fraction() > kSpamSourceFraction || flagged_sources.contains(rec.source_id);
    node.edges.push_back(std::move(e));
  }
  return graph;
}

ReputationState make_state(const UserNode& node) {
  ReputationState s;
  s.user_id = node.user_id;
  s.source_count = node.edges.size();
  s.rg_history.reserve(node.edges.size());
  for (const auto& e : node.edges) {
    s.rg_history.push_back(e.gain);
    if (e.spam_flagged) ++s.k_prime;
  }
  if (!s.rg_history.empty()) {
    s.rg_mean = std::accumulate(s.rg_history.begin(), s.rg_history.end(), 0.0) /
                static_cast<double>(s.rg_history.size());
    s.d_s = significant_difference(std::span<const double>(s.rg_history));
  }
  return s;
}

double significant_difference(const ReputationState& state) {
  if (state.source_count == 0 || state.rg_history.size() != state.source_count) {
    throw EmptyHistory("user " + state.user_id + " has no per-source history");
  }
  return significant_difference(std::span<const double>(state.rg_history));
}

}  // namespace nhad
