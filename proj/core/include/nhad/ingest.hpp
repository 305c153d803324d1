#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nhad/datagen.hpp"
#include "nhad/detector.hpp"
#include "nhad/metrics.hpp"
#include "nhad/reputation.hpp"

namespace nhad {

inline constexpr std::string_view kActivityHeader =
    "user_id,community_id,source_id,hits_other,hits_same,spam_requests,total_requests,p1,p2,p3,p4,p5";
inline constexpr std::string_view kLabelsHeader = "user_id,source_id,is_anomaly,class";
inline constexpr std::string_view kReportCsvHeader =
    "user_id,band,iteration,warnings,ever_flagged,reason,s_f_raw,s_f_user,c_g_crisp,s_f_final";

/// Shortest decimal text that parses back to the same double.
std::string format_number(double v);

std::vector<ActivityRecord> parse_activity_csv(std::istream& in);
std::vector<ActivityRecord> parse_activity_csv(const std::filesystem::path& path);
void write_activity_csv(std::ostream& out, const std::vector<ActivityRecord>& records);
void write_activity_csv(const std::filesystem::path& path, const std::vector<ActivityRecord>& records);

std::vector<LinkLabel> parse_labels_csv(std::istream& in);
std::vector<LinkLabel> parse_labels_csv(const std::filesystem::path& path);
void write_labels_csv(std::ostream& out, const std::vector<LinkLabel>& labels);
void write_labels_csv(const std::filesystem::path& path, const std::vector<LinkLabel>& labels);

enum class ReportFormat { Csv, Json };

ReportFormat report_format_from_string(std::string_view text);

/// JSON: top-level `config`, `verdicts`, `metrics` (null when absent), `iterations`
/// plus run bookkeeping. CSV: one row per verdict under kReportCsvHeader; metrics,
/// when present, go to `<stem>_metrics.csv` next to it. Throws IoError.
void write_report(const DetectionReport& report, const std::optional<RunMetrics>& metrics,
                  const std::filesystem::path& path, ReportFormat format);

std::string report_to_json(const DetectionReport& report, const std::optional<RunMetrics>& metrics);

struct ParsedReport {
  DetectionReport report;
  std::optional<RunMetrics> metrics;
};
ParsedReport report_from_json(std::string_view text);
ParsedReport read_report_json(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Traffic summaries

/// One pre-summarised flow row (packet-capture statistics).
struct TrafficRecord {
  std::string source_address;
  std::string destination_address;
  std::uint64_t packet_count = 0;
  std::uint64_t byte_count = 0;
  double burst_rate = 0.0;
  std::uint32_t length_bucket = 0;
  bool spam_flag = false;            // optional column
  std::uint64_t sensitive_tokens = 0;  // optional column

  friend bool operator==(const TrafficRecord&, const TrafficRecord&) = default;
};

inline constexpr std::string_view kTrafficHeader =
    "source_address,destination_address,packet_count,byte_count,burst_rate,length_bucket";

/// Accepts kTrafficHeader optionally followed by `spam_flag` and `sensitive_tokens`.
std::vector<TrafficRecord> parse_traffic_csv(std::istream& in);
std::vector<TrafficRecord> parse_traffic_csv(const std::filesystem::path& path);
void write_traffic_csv(std::ostream& out, const std::vector<TrafficRecord>& records);

/// Feature -> activation rule for one trust property. Missing bounds are taken
/// from the observed feature range.
struct FeatureBinding {
  std::string feature;
  std::optional<double> min;
  std::optional<double> max;

  friend bool operator==(const FeatureBinding&, const FeatureBinding&) = default;
};

struct PropertyMapping {
  std::array<std::optional<FeatureBinding>, kPropertyCount> properties;
  std::vector<std::string> allow_list;  // destination prefixes considered authorised
  int community_octets = 3;             // source-address prefix length that forms a community

  friend bool operator==(const PropertyMapping&, const PropertyMapping&) = default;
};

/// Feature names understood by map_traffic_records.
const std::vector<std::string>& traffic_features();

/// p1 outside_fraction, p2 spam_fraction, p3 sensitive_rate, p4 out_degree,
/// p5 burst_rate; the last two use observed bounds.
PropertyMapping default_property_mapping();

/// Key-value text: `p<i> = <feature> [min] [max]`, `allow = <prefix> ...`,
/// `community_octets = <n>`; '#' starts a comment line.
PropertyMapping parse_mapping(std::istream& in);
PropertyMapping load_mapping(const std::filesystem::path& path);

/// One activity record per (source address -> destination) pair. Activations are
/// min-max normalised features clamped to [0,1]; packet counts fill the hit and
/// request counters. Throws UnmappedProperty when a property has no binding.
std::vector<ActivityRecord> map_traffic_records(const std::vector<TrafficRecord>& records,
                                                const PropertyMapping& mapping);

}  // namespace nhad
