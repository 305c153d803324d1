#include "nhad/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "nhad/error.hpp"

namespace nhad {

namespace {

using Rng = std::mt19937_64;

constexpr double kSpammyBenignRate = 0.03;

std::string make_id(char prefix, std::size_t n, std::size_t width) {
  std::string digits = std::to_string(n);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return std::string(1, prefix) + digits;
}

std::uint64_t uniform_int(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

double uniform_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double benign_activation(Rng& rng) {
  const double u = uniform_real(rng, 0.0, 1.0);
  return 0.4 * u * u * u;
}

std::vector<std::size_t> pick(Rng& rng, const std::vector<std::size_t>& pool, std::size_t n) {
  std::vector<std::size_t> out;
  out.reserve(n);
  std::sample(pool.begin(), pool.end(), std::back_inserter(out), n, rng);
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

struct Builder {
  Rng& rng;
  LabeledNetwork& net;

  ActivityRecord base(const std::string& user, const std::string& community, const std::string& source) {
    ActivityRecord r;
    r.user_id = user;
    r.community_id = community;
    r.source_id = source;
    return r;
  }

  void push(ActivityRecord r, bool anomalous, AnomalyClass cls) {
    net.links.push_back({r.user_id, r.source_id, anomalous, cls});
    net.records.push_back(std::move(r));
  }

  void benign(const std::string& u, const std::string& c, const std::string& s, bool allow_spammy) {
    auto r = base(u, c, s);
    r.hits_other = uniform_int(rng, 0, 20);
    r.hits_same = uniform_int(rng, 1, 20);
    r.total_requests = uniform_int(rng, 5, 50);
    if (allow_spammy && uniform_real(rng, 0.0, 1.0) < kSpammyBenignRate) {
      // Noisy but harmless: mostly irrelevant requests, no abusive properties.
      const auto lo = static_cast<std::uint64_t>(std::ceil(0.55 * static_cast<double>(r.total_requests)));
      const auto hi = static_cast<std::uint64_t>(std::floor(0.9 * static_cast<double>(r.total_requests)));
      r.spam_requests = uniform_int(rng, lo, std::max(lo, hi));
    } else {
      r.spam_requests = uniform_int(rng, 0, r.total_requests / 10);
    }
    for (auto& a : r.activations) a = benign_activation(rng);
    push(std::move(r), false, AnomalyClass::Benign);
  }

  void intrusive(const std::string& u, const std::string& c, const std::string& s, AnomalyClass cls) {
    auto r = base(u, c, s);
    r.hits_other = uniform_int(rng, 10, 30);
    r.hits_same = uniform_int(rng, 1, 10);
    r.total_requests = uniform_int(rng, 20, 60);
    const double spam = cls == AnomalyClass::Hard ? uniform_real(rng, 0.6, 0.8) : uniform_real(rng, 0.55, 0.7);
    r.spam_requests = static_cast<std::uint64_t>(std::lround(spam * static_cast<double>(r.total_requests)));
    for (auto& a : r.activations) a = uniform_real(rng, 0.95, 1.0);
    push(std::move(r), true, cls);
  }

  void flood(const std::string& u, const std::string& c, const std::string& s) {
    auto r = base(u, c, s);
    r.hits_other = uniform_int(rng, 0, 1);
    r.hits_same = uniform_int(rng, 5, 20);
    r.total_requests = uniform_int(rng, 40, 120);
    r.spam_requests = r.total_requests - uniform_int(rng, 0, 1);
    for (std::size_t d = 0; d < kPropertyCount; ++d) {
      const auto p = static_cast<TrustProperty>(d);
      const bool abusive = p == TrustProperty::SpamHits || p == TrustProperty::OutDegree ||
                           p == TrustProperty::SingleSourceExcess;
      r.activations[d] = abusive ? uniform_real(rng, 0.9, 1.0) : benign_activation(rng);
    }
    push(std::move(r), true, AnomalyClass::Hard);
  }
};

}  // namespace

void SyntheticConfig::validate() const {
  if (n_communities < 1) throw InvalidConfig("need at least one community");
  if (!(lambda > 0.0) || !(source_lambda > 0.0)) throw InvalidConfig("Poisson means must be positive");
  if (min_connections < 1 || max_connections < min_connections) {
    throw InvalidConfig("connections per user must satisfy 1 <= min <= max");
  }
  if (!(anomaly_fraction >= 0.0 && anomaly_fraction <= 0.5)) {
    throw InvalidConfig("anomaly fraction must lie in [0, 0.5]");
  }
  if (!(active_user_fraction > 0.0 && active_user_fraction <= 1.0)) {
    throw InvalidConfig("active user fraction must lie in (0, 1]");
  }
  if (!(hard_share >= 0.0 && hard_share <= 1.0)) throw InvalidConfig("hard share must lie in [0, 1]");
}

LabeledNetwork generate(const SyntheticConfig& config) {
  config.validate();
  Rng rng(config.seed);
  LabeledNetwork net;

  const std::size_t community_width = std::to_string(config.n_communities).size();
  std::vector<std::pair<std::string, std::string>> all_users;  // (user, community)
  std::poisson_distribution<int> user_count(config.lambda);
  for (int c = 0; c < config.n_communities; ++c) {
    const std::string community = make_id('c', static_cast<std::size_t>(c), community_width);
    net.communities.push_back(community);
    const int size = user_count(rng);
    for (int i = 0; i < size; ++i) all_users.emplace_back(std::string(), community);
  }
  const std::size_t user_width = std::max<std::size_t>(6, std::to_string(all_users.size()).size());
  for (std::size_t i = 0; i < all_users.size(); ++i) all_users[i].first = make_id('u', i, user_width);

  std::vector<std::size_t> order(all_users.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  auto n_active = static_cast<std::size_t>(
      std::lround(config.active_user_fraction * static_cast<double>(all_users.size())));
  if (!all_users.empty()) n_active = std::max<std::size_t>(n_active, 1);
  order.resize(n_active);
  std::sort(order.begin(), order.end());
  for (std::size_t idx : order) {
    net.users.push_back(all_users[idx].first);
    net.network.add_user(all_users[idx].first, all_users[idx].second);
  }

  const auto n_sources = static_cast<std::size_t>(
      std::max(2, std::poisson_distribution<int>(config.source_lambda)(rng)));
  const std::size_t source_width = std::max<std::size_t>(4, std::to_string(n_sources).size());
  for (std::size_t s = 0; s < n_sources; ++s) net.sources.push_back(make_id('s', s, source_width));

  std::vector<std::size_t> source_order(n_sources);
  std::iota(source_order.begin(), source_order.end(), 0);
  std::shuffle(source_order.begin(), source_order.end(), rng);
  const auto n_anomalous_sources = std::min<std::size_t>(
      n_sources - 1,
      static_cast<std::size_t>(std::lround(config.anomaly_fraction * static_cast<double>(n_sources))));
  std::vector<std::size_t> anomalous_pool(source_order.begin(),
                                          source_order.begin() + static_cast<std::ptrdiff_t>(n_anomalous_sources));
  std::vector<std::size_t> benign_pool(source_order.begin() + static_cast<std::ptrdiff_t>(n_anomalous_sources),
                                       source_order.end());
  std::sort(anomalous_pool.begin(), anomalous_pool.end());
  std::sort(benign_pool.begin(), benign_pool.end());
  for (std::size_t s = 0; s < n_sources; ++s) net.source_anomalous[net.sources[s]] = false;
  for (std::size_t s : anomalous_pool) net.source_anomalous[net.sources[s]] = true;

  const std::size_t n_anomalous_users =
      n_anomalous_sources == 0
          ? 0
          : static_cast<std::size_t>(std::lround(config.anomaly_fraction * static_cast<double>(net.users.size())));
  std::vector<AnomalyClass> profile(net.users.size(), AnomalyClass::Benign);
  {
    std::vector<std::size_t> idx(net.users.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t i = 0; i < n_anomalous_users; ++i) {
      profile[idx[i]] = uniform_real(rng, 0.0, 1.0) < config.hard_share ? AnomalyClass::Hard : AnomalyClass::Soft;
    }
  }

  Builder b{rng, net};
  std::binomial_distribution<int> extra_intrusive(8, config.anomaly_fraction);
  for (std::size_t i = 0; i < net.users.size(); ++i) {
    const std::string& user = net.users[i];
    const std::string& community = net.network.community_of(user);
    switch (profile[i]) {
      case AnomalyClass::Benign: {
        const auto k = std::min<std::size_t>(
            uniform_int(rng, static_cast<std::uint64_t>(config.min_connections),
                        static_cast<std::uint64_t>(config.max_connections)),
            benign_pool.size());
        for (std::size_t s : pick(rng, benign_pool, k)) b.benign(user, community, net.sources[s], true);
        break;
      }
      case AnomalyClass::Soft: {
        std::size_t k = 1 + static_cast<std::size_t>(extra_intrusive(rng));
        k = std::min({k, anomalous_pool.size(), benign_pool.size()});
        for (std::size_t s : pick(rng, anomalous_pool, k)) {
          b.intrusive(user, community, net.sources[s], AnomalyClass::Soft);
        }
        for (std::size_t s : pick(rng, benign_pool, k)) b.benign(user, community, net.sources[s], false);
        break;
      }
      case AnomalyClass::Hard: {
        std::size_t intr = uniform_int(rng, 1, 3);
        std::size_t floods = uniform_int(rng, 1, 2);
        const std::size_t clean = intr >= 2 ? uniform_int(rng, 0, 1) : 0;
        intr = std::min(intr, anomalous_pool.size());
        floods = std::min(floods, anomalous_pool.size() - intr);
        auto targets = pick(rng, anomalous_pool, intr + floods);
        for (std::size_t j = 0; j < targets.size(); ++j) {
          if (j < intr) {
            b.intrusive(user, community, net.sources[targets[j]], AnomalyClass::Hard);
          } else {
            b.flood(user, community, net.sources[targets[j]]);
          }
        }
        for (std::size_t s : pick(rng, benign_pool, clean)) b.benign(user, community, net.sources[s], false);
        break;
      }
    }
  }

  net.ground_truth = ground_truth_from_links(net.links);
  return net;
}

GroundTruth ground_truth_from_links(const std::vector<LinkLabel>& links) {
  GroundTruth truth;
  for (const auto& link : links) {
    auto& label = truth[link.user_id];
    if (link.anomaly) {
      label.anomaly = true;
      if (static_cast<int>(link.cls) > static_cast<int>(label.cls)) label.cls = link.cls;
    }
  }
  return truth;
}

std::string_view to_string(AnomalyClass c) noexcept {
  switch (c) {
    case AnomalyClass::Benign: return "benign";
    case AnomalyClass::Soft: return "soft";
    case AnomalyClass::Hard: return "hard";
  }
  return "";
}

AnomalyClass anomaly_class_from_string(std::string_view text) {
  for (auto c : {AnomalyClass::Benign, AnomalyClass::Soft, AnomalyClass::Hard}) {
    if (to_string(c) == text) return c;
  }
  throw ParseError("unknown anomaly class '" + std::string(text) + "'");
}

}  // namespace nhad
