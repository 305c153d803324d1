#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "csv_util.hpp"
#include "nhad/error.hpp"
#include "nhad/ingest.hpp"

namespace nhad {

namespace {

constexpr std::string_view kSpamColumn = "spam_flag";
constexpr std::string_view kSensitiveColumn = "sensitive_tokens";

// Features whose values already live in [0,1]; their default bounds are fixed.
bool has_unit_bounds(std::string_view feature) {
  return feature == "outside_fraction" || feature == "spam_fraction" || feature == "sensitive_rate" ||
         feature == "busiest_share";
}

std::string community_of_address(const std::string& address, int octets) {
  std::size_t pos = 0;
  for (int i = 0; i < octets; ++i) {
    pos = address.find('.', pos);
    if (pos == std::string::npos) return address;
    if (i + 1 < octets) ++pos;
  }
  return address.substr(0, pos);
}

bool allowed(const std::string& destination, const std::vector<std::string>& allow_list) {
  return std::any_of(allow_list.begin(), allow_list.end(),
                     [&](const std::string& prefix) { return destination.starts_with(prefix); });
}

struct PairStats {
  std::uint64_t packets = 0;
  std::uint64_t bytes = 0;
  std::uint64_t spam_packets = 0;
  std::uint64_t tokens = 0;
  double burst = 0.0;
  std::uint32_t bucket = 0;
};

struct HostStats {
  std::uint64_t packets = 0;
  std::uint64_t spam_packets = 0;
  std::size_t destinations = 0;
  std::size_t outside = 0;
};

}  // namespace

std::vector<TrafficRecord> parse_traffic_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaMismatch("missing header", 1);
  const auto header = csv::split(line);
  const auto base = csv::split(kTrafficHeader);
  if (header.size() < base.size() || !std::equal(base.begin(), base.end(), header.begin())) {
    throw SchemaMismatch("header must start with '" + std::string(kTrafficHeader) + "'", 1);
  }
  std::optional<std::size_t> spam_col;
  std::optional<std::size_t> token_col;
  for (std::size_t i = base.size(); i < header.size(); ++i) {
    if (header[i] == kSpamColumn && !spam_col) spam_col = i;
    else if (header[i] == kSensitiveColumn && !token_col) token_col = i;
    else throw SchemaMismatch("unexpected column '" + header[i] + "'", 1);
  }

  std::vector<TrafficRecord> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (csv::trim(line).empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != header.size()) {
      throw SchemaMismatch("expected " + std::to_string(header.size()) + " columns", row);
    }
    TrafficRecord r;
    r.source_address = f[0];
    r.destination_address = f[1];
    if (r.source_address.empty() || r.destination_address.empty()) throw ParseError("empty address", row);
    r.packet_count = csv::to_uint(f[2], row);
    r.byte_count = csv::to_uint(f[3], row);
    r.burst_rate = csv::to_double(f[4], row);
    if (r.burst_rate < 0.0) throw ParseError("negative burst_rate", row);
    const auto bucket = csv::to_uint(f[5], row);
    if (bucket > UINT32_MAX) throw ParseError("length_bucket out of range", row);
    r.length_bucket = static_cast<std::uint32_t>(bucket);
    if (spam_col) {
      const auto& s = f[*spam_col];
      if (s == "1") r.spam_flag = true;
      else if (s != "0") throw ParseError("spam_flag must be 0 or 1", row);
    }
    if (token_col) r.sensitive_tokens = csv::to_uint(f[*token_col], row);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<TrafficRecord> parse_traffic_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return parse_traffic_csv(in);
}

void write_traffic_csv(std::ostream& out, const std::vector<TrafficRecord>& records) {
  out << kTrafficHeader << ',' << kSpamColumn << ',' << kSensitiveColumn << '\n';
  for (const auto& r : records) {
    out << r.source_address << ',' << r.destination_address << ',' << r.packet_count << ',' << r.byte_count
        << ',' << format_number(r.burst_rate) << ',' << r.length_bucket << ',' << (r.spam_flag ? 1 : 0) << ','
        << r.sensitive_tokens << '\n';
  }
}

const std::vector<std::string>& traffic_features() {
  static const std::vector<std::string> features{
      "outside_fraction", "spam_fraction",  "sensitive_rate", "out_degree",   "burst_rate",
      "packet_count",     "byte_count",     "mean_length",    "length_bucket", "busiest_share",
  };
  return features;
}

PropertyMapping default_property_mapping() {
  PropertyMapping m;
  m.properties[0] = FeatureBinding{"outside_fraction", std::nullopt, std::nullopt};
  m.properties[1] = FeatureBinding{"spam_fraction", std::nullopt, std::nullopt};
  m.properties[2] = FeatureBinding{"sensitive_rate", std::nullopt, std::nullopt};
  m.properties[3] = FeatureBinding{"out_degree", std::nullopt, std::nullopt};
  m.properties[4] = FeatureBinding{"burst_rate", std::nullopt, std::nullopt};
  return m;
}

PropertyMapping parse_mapping(std::istream& in) {
  PropertyMapping m;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const auto text = csv::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", row);
    const std::string key(csv::trim(text.substr(0, eq)));
    std::istringstream values{std::string(csv::trim(text.substr(eq + 1)))};
    std::vector<std::string> words;
    for (std::string w; values >> w;) words.push_back(w);
    if (words.empty()) throw ParseError("missing value for '" + key + "'", row);

    if (key == "allow") {
      m.allow_list.insert(m.allow_list.end(), words.begin(), words.end());
    } else if (key == "community_octets") {
      const auto n = csv::to_uint(words[0], row);
      if (words.size() != 1 || n < 1 || n > 16) throw ParseError("community_octets must be one integer in [1,16]", row);
      m.community_octets = static_cast<int>(n);
    } else if (key.size() == 2 && key[0] == 'p' && key[1] >= '1' && key[1] < '1' + static_cast<int>(kPropertyCount)) {
      const auto& names = traffic_features();
      if (std::find(names.begin(), names.end(), words[0]) == names.end()) {
        throw ParseError("unknown feature '" + words[0] + "'", row);
      }
      if (words.size() == 2 || words.size() > 3) throw ParseError("bounds need both min and max", row);
      FeatureBinding b{words[0], std::nullopt, std::nullopt};
      if (words.size() == 3) {
        b.min = csv::to_double(words[1], row);
        b.max = csv::to_double(words[2], row);
        if (!(*b.min < *b.max)) throw ParseError("min must be below max", row);
      }
      const auto index = static_cast<std::size_t>(key[1] - '1');
      if (m.properties[index]) throw ParseError("duplicate binding for " + key, row);
      m.properties[index] = std::move(b);
    } else {
      throw ParseError("unknown key '" + key + "'", row);
    }
  }
  return m;
}

PropertyMapping load_mapping(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  return parse_mapping(in);
}

std::vector<ActivityRecord> map_traffic_records(const std::vector<TrafficRecord>& records,
                                                const PropertyMapping& mapping) {
  for (std::size_t d = 0; d < kPropertyCount; ++d) {
    if (!mapping.properties[d]) throw UnmappedProperty("no feature bound to p" + std::to_string(d + 1));
  }

  std::map<std::pair<std::string, std::string>, PairStats> pairs;
  for (const auto& r : records) {
    auto& p = pairs[{r.source_address, r.destination_address}];
    p.packets += r.packet_count;
    p.bytes += r.byte_count;
    if (r.spam_flag) p.spam_packets += r.packet_count;
    p.tokens += r.sensitive_tokens;
    p.burst = std::max(p.burst, r.burst_rate);
    p.bucket = std::max(p.bucket, r.length_bucket);
  }

  std::map<std::string, HostStats> hosts;
  std::map<std::string, std::uint64_t> busiest;
  for (const auto& [key, p] : pairs) {
    auto& h = hosts[key.first];
    h.packets += p.packets;
    h.spam_packets += p.spam_packets;
    ++h.destinations;
    if (!allowed(key.second, mapping.allow_list)) ++h.outside;
    auto& top = busiest[key.first];
    top = std::max(top, p.packets);
  }

  auto feature_value = [&](std::string_view name, const std::string& src, const PairStats& p) -> double {
    const auto& h = hosts.at(src);
    const auto share = [](std::uint64_t num, std::uint64_t den) {
      return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
    };
    if (name == "outside_fraction") return share(h.outside, h.destinations);
    if (name == "spam_fraction") return share(h.spam_packets, h.packets);
    if (name == "sensitive_rate") return share(p.tokens, p.packets);
    if (name == "out_degree") return static_cast<double>(h.destinations);
    if (name == "burst_rate") return p.burst;
    if (name == "packet_count") return static_cast<double>(p.packets);
    if (name == "byte_count") return static_cast<double>(p.bytes);
    if (name == "mean_length") return share(p.bytes, p.packets);
    if (name == "length_bucket") return static_cast<double>(p.bucket);
    if (name == "busiest_share") return share(p.packets, busiest.at(src));
    throw InvalidConfig("unknown traffic feature '" + std::string(name) + "'");
  };

  std::array<double, kPropertyCount> lo{};
  std::array<double, kPropertyCount> hi{};
  for (std::size_t d = 0; d < kPropertyCount; ++d) {
    const auto& b = *mapping.properties[d];
    if (has_unit_bounds(b.feature)) {
      lo[d] = 0.0;
      hi[d] = 1.0;
    } else {
      lo[d] = std::numeric_limits<double>::infinity();
      hi[d] = -std::numeric_limits<double>::infinity();
      for (const auto& [key, p] : pairs) {
        const double v = feature_value(b.feature, key.first, p);
        lo[d] = std::min(lo[d], v);
        hi[d] = std::max(hi[d], v);
      }
    }
    if (b.min) lo[d] = *b.min;
    if (b.max) hi[d] = *b.max;
  }

  std::vector<ActivityRecord> out;
  out.reserve(pairs.size());
  for (const auto& [key, p] : pairs) {
    ActivityRecord r;
    r.user_id = key.first;
    r.community_id = community_of_address(key.first, mapping.community_octets);
    r.source_id = key.second;
    r.hits_other = p.packets;
    r.hits_same = 0;
    r.total_requests = p.packets;
    r.spam_requests = p.spam_packets;
    for (std::size_t d = 0; d < kPropertyCount; ++d) {
      const double v = feature_value(mapping.properties[d]->feature, key.first, p);
      const double span = hi[d] - lo[d];
      r.activations[d] = span > 0.0 ? std::clamp((v - lo[d]) / span, 0.0, 1.0) : 0.0;
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace nhad
