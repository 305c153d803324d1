#include "nhad/ingest.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "csv_util.hpp"
#include "json.hpp"
#include "nhad/error.hpp"

namespace nhad {

using json = nlohmann::ordered_json;

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return in;
}

void finish(std::ostream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> number_or_null(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

json costs_to_json(const CostBreakdown& c) {
  return json{{"s_f_raw", c.s_f_raw}, {"s_f_user", c.s_f_user}, {"c_g_crisp", c.c_g_crisp},
              {"s_f_final", c.s_f_final}};
}

CostBreakdown costs_from_json(const json& j) {
  return {j.at("s_f_raw").get<double>(), j.at("s_f_user").get<double>(), j.at("c_g_crisp").get<double>(),
          j.at("s_f_final").get<double>()};
}

json metrics_to_json(const RunMetrics& m) {
  return json{
      {"confusion", {{"tp", m.confusion.tp}, {"fp", m.confusion.fp}, {"tn", m.confusion.tn}, {"fn", m.confusion.fn}}},
      {"accuracy", optional_number(m.scores.accuracy)},
      {"detection_rate", optional_number(m.scores.detection_rate)},
      {"false_positive_rate", optional_number(m.scores.false_positive_rate)},
      {"precision", optional_number(m.scores.precision)},
      {"f_score", optional_number(m.scores.f_score)},
      {"filtering_rate", m.filtering_rate},
      {"convergence_value", optional_number(m.convergence_value)},
      {"users_recovered_pct", optional_number(m.users_recovered_pct)},
      {"soft_recovered_pct", optional_number(m.soft_recovered_pct)},
      {"failed", m.failed},
  };
}

RunMetrics metrics_from_json(const json& j) {
  RunMetrics m;
  const auto& c = j.at("confusion");
  m.confusion = {c.at("tp").get<std::size_t>(), c.at("fp").get<std::size_t>(), c.at("tn").get<std::size_t>(),
                 c.at("fn").get<std::size_t>()};
  m.scores.accuracy = number_or_null(j.at("accuracy"));
  m.scores.detection_rate = number_or_null(j.at("detection_rate"));
  m.scores.false_positive_rate = number_or_null(j.at("false_positive_rate"));
  m.scores.precision = number_or_null(j.at("precision"));
  m.scores.f_score = number_or_null(j.at("f_score"));
  m.filtering_rate = j.at("filtering_rate").get<double>();
  m.convergence_value = number_or_null(j.at("convergence_value"));
  m.users_recovered_pct = number_or_null(j.at("users_recovered_pct"));
  m.soft_recovered_pct = number_or_null(j.at("soft_recovered_pct"));
  m.failed = j.at("failed").get<bool>();
  return m;
}

std::string na_or_number(const std::optional<double>& v) { return v ? format_number(*v) : "NA"; }

}  // namespace

// ---------------------------------------------------------------------------
// Activity CSV

std::vector<ActivityRecord> parse_activity_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaMismatch("missing header", 1);
  if (csv::trim(line) != kActivityHeader) {
    throw SchemaMismatch("header does not match '" + std::string(kActivityHeader) + "'", 1);
  }
  std::vector<ActivityRecord> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (csv::trim(line).empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 12) {
      throw SchemaMismatch("expected 12 columns, found " + std::to_string(f.size()), row);
    }
    ActivityRecord r;
    r.user_id = f[0];
    r.community_id = f[1];
    r.source_id = f[2];
    if (r.user_id.empty() || r.community_id.empty() || r.source_id.empty()) {
      throw ParseError("empty identifier", row);
    }
    r.hits_other = csv::to_uint(f[3], row);
    r.hits_same = csv::to_uint(f[4], row);
    r.spam_requests = csv::to_uint(f[5], row);
    r.total_requests = csv::to_uint(f[6], row);
    if (r.spam_requests > r.total_requests) {
      throw ParseError("spam_requests exceeds total_requests", row);
    }
    for (std::size_t d = 0; d < kPropertyCount; ++d) {
      const double a = csv::to_double(f[7 + d], row);
      if (a < 0.0 || a > 1.0) throw ParseError("activation p" + std::to_string(d + 1) + " outside [0,1]", row);
      r.activations[d] = a;
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ActivityRecord> parse_activity_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_activity_csv(in);
}

void write_activity_csv(std::ostream& out, const std::vector<ActivityRecord>& records) {
  out << kActivityHeader << '\n';
  for (const auto& r : records) {
    out << r.user_id << ',' << r.community_id << ',' << r.source_id << ',' << r.hits_other << ','
        << r.hits_same << ',' << r.spam_requests << ',' << r.total_requests;
    for (double a : r.activations) out << ',' << format_number(a);
    out << '\n';
  }
}

void write_activity_csv(const std::filesystem::path& path, const std::vector<ActivityRecord>& records) {
  auto out = open_out(path);
  write_activity_csv(out, records);
  finish(out, path);
}

// ---------------------------------------------------------------------------
// Labels CSV

std::vector<LinkLabel> parse_labels_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || csv::trim(line) != kLabelsHeader) {
    throw SchemaMismatch("header does not match '" + std::string(kLabelsHeader) + "'", 1);
  }
  std::vector<LinkLabel> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (csv::trim(line).empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 4) throw SchemaMismatch("expected 4 columns", row);
    LinkLabel l;
    l.user_id = f[0];
    l.source_id = f[1];
    if (f[2] == "1") l.anomaly = true;
    else if (f[2] != "0") throw ParseError("is_anomaly must be 0 or 1", row);
    try {
      l.cls = anomaly_class_from_string(f[3]);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), row);
    }
    out.push_back(std::move(l));
  }
  return out;
}

std::vector<LinkLabel> parse_labels_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_labels_csv(in);
}

void write_labels_csv(std::ostream& out, const std::vector<LinkLabel>& labels) {
  out << kLabelsHeader << '\n';
  for (const auto& l : labels) {
    out << l.user_id << ',' << l.source_id << ',' << (l.anomaly ? 1 : 0) << ',' << to_string(l.cls) << '\n';
  }
}

void write_labels_csv(const std::filesystem::path& path, const std::vector<LinkLabel>& labels) {
  auto out = open_out(path);
  write_labels_csv(out, labels);
  finish(out, path);
}

// ---------------------------------------------------------------------------
// Reports

ReportFormat report_format_from_string(std::string_view text) {
  if (text == "csv") return ReportFormat::Csv;
  if (text == "json") return ReportFormat::Json;
  throw InvalidConfig("unknown report format '" + std::string(text) + "'");
}

std::string report_to_json(const DetectionReport& report, const std::optional<RunMetrics>& metrics) {
  json j;
  j["config"] = report.config;
  j["seed"] = report.seed;
  j["iterations_used"] = report.iterations_used;
  j["iteration_budget"] = report.iteration_budget;
  j["converged"] = report.converged;
  j["community_costs"] = report.community_costs;
  json iterations = json::array();
  for (const auto& s : report.iterations) {
    iterations.push_back({{"iteration", s.iteration},
                          {"safe", s.safe},
                          {"soft", s.soft},
                          {"hard", s.hard},
                          {"recovered", s.recovered},
                          {"eliminated", s.eliminated},
                          {"mean_s_f_final", s.mean_s_f_final}});
  }
  j["iterations"] = std::move(iterations);
  json verdicts = json::array();
  for (const auto& v : report.verdicts) {
    verdicts.push_back({{"user_id", v.user_id},
                        {"band", to_string(v.band)},
                        {"iteration", v.iteration},
                        {"warnings", v.warnings},
                        {"ever_flagged", v.ever_flagged},
                        {"reason", to_string(v.reason)},
                        {"terminated_sources", v.terminated_sources},
                        {"costs", costs_to_json(v.costs)}});
  }
  j["verdicts"] = std::move(verdicts);
  j["metrics"] = metrics ? metrics_to_json(*metrics) : json(nullptr);
  return j.dump(2) + "\n";
}

ParsedReport report_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("report JSON: ") + e.what());
  }
  try {
    ParsedReport out;
    auto& r = out.report;
    r.config = j.at("config").get<std::map<std::string, std::string>>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.iterations_used = j.at("iterations_used").get<int>();
    r.iteration_budget = j.at("iteration_budget").get<int>();
    r.converged = j.at("converged").get<bool>();
    r.community_costs = j.at("community_costs").get<std::map<std::string, double>>();
    for (const auto& s : j.at("iterations")) {
      r.iterations.push_back({s.at("iteration").get<int>(), s.at("safe").get<std::size_t>(),
                              s.at("soft").get<std::size_t>(), s.at("hard").get<std::size_t>(),
                              s.at("recovered").get<std::size_t>(), s.at("eliminated").get<std::size_t>(),
                              s.at("mean_s_f_final").get<double>()});
    }
    for (const auto& v : j.at("verdicts")) {
      Verdict out_v;
      out_v.user_id = v.at("user_id").get<std::string>();
      out_v.band = band_from_string(v.at("band").get<std::string>());
      out_v.iteration = v.at("iteration").get<int>();
      out_v.warnings = v.at("warnings").get<int>();
      out_v.ever_flagged = v.at("ever_flagged").get<bool>();
      out_v.reason = elimination_reason_from_string(v.at("reason").get<std::string>());
      out_v.terminated_sources = v.at("terminated_sources").get<std::vector<std::string>>();
      out_v.costs = costs_from_json(v.at("costs"));
      r.verdicts.push_back(std::move(out_v));
    }
    if (!j.at("metrics").is_null()) out.metrics = metrics_from_json(j.at("metrics"));
    return out;
  } catch (const json::exception& e) {
    throw ParseError(std::string("report JSON: ") + e.what());
  }
}

ParsedReport read_report_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return report_from_json(buf.str());
}

void write_report(const DetectionReport& report, const std::optional<RunMetrics>& metrics,
                  const std::filesystem::path& path, ReportFormat format) {
  if (format == ReportFormat::Json) {
    auto out = open_out(path);
    out << report_to_json(report, metrics);
    finish(out, path);
    return;
  }
  auto out = open_out(path);
  out << kReportCsvHeader << '\n';
  for (const auto& v : report.verdicts) {
    out << v.user_id << ',' << to_string(v.band) << ',' << v.iteration << ',' << v.warnings << ','
        << (v.ever_flagged ? 1 : 0) << ',' << to_string(v.reason) << ',' << format_number(v.costs.s_f_raw) << ','
        << format_number(v.costs.s_f_user) << ',' << format_number(v.costs.c_g_crisp) << ','
        << format_number(v.costs.s_f_final) << '\n';
  }
  finish(out, path);
  if (!metrics) return;

  auto metrics_path = path.parent_path() / (path.stem().string() + "_metrics.csv");
  auto m_out = open_out(metrics_path);
  const auto& m = *metrics;
  m_out << "metric,value\n"
        << "tp," << m.confusion.tp << '\n'
        << "fp," << m.confusion.fp << '\n'
        << "tn," << m.confusion.tn << '\n'
        << "fn," << m.confusion.fn << '\n'
        << "accuracy," << na_or_number(m.scores.accuracy) << '\n'
        << "detection_rate," << na_or_number(m.scores.detection_rate) << '\n'
        << "false_positive_rate," << na_or_number(m.scores.false_positive_rate) << '\n'
        << "precision," << na_or_number(m.scores.precision) << '\n'
        << "f_score," << na_or_number(m.scores.f_score) << '\n'
        << "filtering_rate," << format_number(m.filtering_rate) << '\n'
        << "convergence_value," << na_or_number(m.convergence_value) << '\n'
        << "users_recovered_pct," << na_or_number(m.users_recovered_pct) << '\n'
        << "soft_recovered_pct," << na_or_number(m.soft_recovered_pct) << '\n'
        << "failed," << (m.failed ? 1 : 0) << '\n';
  finish(m_out, metrics_path);
}

}  // namespace nhad
