#include "cli.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nhad/detector.hpp"
#include "nhad/error.hpp"
#include "nhad/fuzzy.hpp"

namespace nhad::cli {

namespace {

fuzzy::FuzzyInferenceSystem make_fis(const std::optional<std::filesystem::path>& rules, std::size_t samples) {
  auto fis = fuzzy::build_default_fis(samples);
  if (!rules) return fis;
  return fis.with_rules(fuzzy::load_rules(*rules, fis.inputs(), fis.output()));
}

std::string extension(ReportFormat f) { return f == ReportFormat::Json ? ".json" : ".csv"; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : "NA"; }

void add_threshold_flags(CLI::App& sub, HealingThresholds& th, int& budget) {
  sub.add_option("--safe", th.safe, "Safe threshold on the final cost")->capture_default_str();
  sub.add_option("--hard", th.hard, "Hard-anomaly threshold on the final cost")->capture_default_str();
  sub.add_option("--warnings", th.max_warnings, "Warnings before elimination")->capture_default_str();
  sub.add_option("--budget", budget, "Iteration budget")->capture_default_str();
}

void add_synthetic_flags(CLI::App& sub, SyntheticConfig& c) {
  sub.add_option("--lambda", c.lambda, "Poisson mean of users per community")->capture_default_str();
  sub.add_option("--communities", c.n_communities, "Number of communities")->capture_default_str();
  sub.add_option("--sources", c.source_lambda, "Poisson mean of the source count")->capture_default_str();
  sub.add_option("--anomaly", c.anomaly_fraction, "Anomalous fraction of sources and users (<= 0.5)")
      ->capture_default_str();
  sub.add_option("--active", c.active_user_fraction, "Fraction of users that are active")->capture_default_str();
  sub.add_option("--hard-share", c.hard_share, "Share of anomalous users with the hard profile")
      ->capture_default_str();
  sub.add_option("--seed", c.seed, "Random seed")->capture_default_str();
}

void add_fis_flags(CLI::App& sub, std::optional<std::filesystem::path>& rules, std::size_t& samples) {
  sub.add_option("--rules", rules, "Rule file replacing the default rule base")->check(CLI::ExistingFile);
  sub.add_option("--samples", samples, "Output-domain samples for defuzzification")->capture_default_str();
}

CLI::Option* add_format_flag(CLI::App& sub, std::string& format) {
  return sub.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

}  // namespace

void cmd_generate(const SyntheticConfig& config, const std::filesystem::path& out) {
  config.validate();
  const auto net = generate(config);
  ensure_dir(out);
  write_activity_csv(out / "activity.csv", net.records);
  write_labels_csv(out / "labels.csv", net.links);
}

int cmd_detect(const DetectOptions& o, std::ostream& log) {
  if (o.activity.has_value() == o.traffic.has_value()) {
    throw InvalidConfig("give exactly one of --activity or --traffic");
  }
  if (o.mapping && !o.traffic) throw InvalidConfig("--mapping needs --traffic");

  const auto fis = make_fis(o.rules, o.samples);
  std::vector<ActivityRecord> records;
  if (o.activity) {
    records = parse_activity_csv(*o.activity);
  } else {
    const auto mapping = o.mapping ? load_mapping(*o.mapping) : default_property_mapping();
    records = map_traffic_records(parse_traffic_csv(*o.traffic), mapping);
  }

  DetectionConfig config;
  config.thresholds = o.thresholds;
  config.iteration_budget = o.budget;
  config.seed = o.seed;
  auto report = run_detection(records, fis, config);
  report.config["input"] = o.activity ? o.activity->string() : o.traffic->string();
  if (o.rules) report.config["rules"] = o.rules->string();
  if (o.mapping) report.config["mapping"] = o.mapping->string();

  std::optional<RunMetrics> metrics;
  if (o.labels) metrics = evaluate_run(ground_truth_from_links(parse_labels_csv(*o.labels)), report);

  ensure_dir(o.out);
  write_report(report, metrics, o.out / ("report" + extension(o.format)), o.format);

  const auto& last = report.iterations.back();
  log << "users " << report.verdicts.size() << " safe " << last.safe << " soft " << last.soft << " hard "
      << last.hard << " recovered " << last.recovered << " eliminated " << last.eliminated << " iterations "
      << report.iterations_used << '/' << report.iteration_budget << (report.converged ? "" : " (budget exhausted)")
      << '\n';
  if (metrics && metrics->scores.accuracy) log << "accuracy " << format_number(*metrics->scores.accuracy) << '\n';
  return report.converged ? kOk : kNotConverged;
}

EvaluateResult cmd_evaluate(const EvaluateOptions& o) {
  if (o.runs < 1) throw InvalidConfig("--runs must be at least 1");
  o.synthetic.validate();
  const auto fis = make_fis(o.rules, o.samples);

  EvaluateResult result;
  std::vector<RunMetrics> all;
  for (int i = 0; i < o.runs; ++i) {
    SyntheticConfig cfg = o.synthetic;
    cfg.seed = o.synthetic.seed + static_cast<std::uint64_t>(i);
    const auto net = generate(cfg);
    DetectionConfig dc;
    dc.thresholds = o.thresholds;
    dc.iteration_budget = o.budget;
    dc.seed = cfg.seed;
    const auto report = run_detection(net.records, net.network, fis, dc);
    auto m = evaluate_run(net.ground_truth, report);
    all.push_back(m);
    result.rows.push_back({i, cfg.seed, std::move(m)});
  }
  result.summary = summarize(all);

  ensure_dir(o.out);
  const auto text = o.format == ReportFormat::Json ? format_summary_json(result) : format_summary_csv(result);
  write_text(o.out / ("summary" + extension(o.format)), text);
  return result;
}

std::string format_summary_csv(const EvaluateResult& r) {
  std::ostringstream s;
  s << "run,seed,anomaly_filtering_rate,users_recovered_pct,accuracy,failures,convergence_value,"
       "detection_rate,false_positive_rate,precision,f_score,soft_recovered_pct\n";
  for (const auto& row : r.rows) {
    const auto& m = row.metrics;
    s << row.run << ',' << row.seed << ',' << format_number(m.filtering_rate) << ',' << cell(m.users_recovered_pct)
      << ',' << cell(m.scores.accuracy) << ',' << (m.failed ? 1 : 0) << ',' << cell(m.convergence_value) << ','
      << cell(m.scores.detection_rate) << ',' << cell(m.scores.false_positive_rate) << ','
      << cell(m.scores.precision) << ',' << cell(m.scores.f_score) << ',' << cell(m.soft_recovered_pct) << '\n';
  }
  const auto& b = r.summary;
  s << "mean,," << cell(b.filtering_rate) << ',' << cell(b.users_recovered_pct) << ',' << cell(b.accuracy) << ','
    << b.failures << ',' << cell(b.convergence_value) << ',' << cell(b.detection_rate) << ','
    << cell(b.false_positive_rate) << ',' << cell(b.precision) << ',' << cell(b.f_score) << ','
    << cell(b.soft_recovered_pct) << '\n';
  return s.str();
}

std::string format_summary_json(const EvaluateResult& r) {
  using json = nlohmann::ordered_json;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json runs = json::array();
  for (const auto& row : r.rows) {
    const auto& m = row.metrics;
    runs.push_back({{"run", row.run},
                    {"seed", row.seed},
                    {"anomaly_filtering_rate", m.filtering_rate},
                    {"users_recovered_pct", opt(m.users_recovered_pct)},
                    {"accuracy", opt(m.scores.accuracy)},
                    {"failed", m.failed},
                    {"convergence_value", opt(m.convergence_value)},
                    {"detection_rate", opt(m.scores.detection_rate)},
                    {"false_positive_rate", opt(m.scores.false_positive_rate)},
                    {"precision", opt(m.scores.precision)},
                    {"f_score", opt(m.scores.f_score)},
                    {"soft_recovered_pct", opt(m.soft_recovered_pct)}});
  }
  const auto& b = r.summary;
  json mean{{"runs", b.runs},
            {"anomaly_filtering_rate", opt(b.filtering_rate)},
            {"users_recovered_pct", opt(b.users_recovered_pct)},
            {"accuracy", opt(b.accuracy)},
            {"failures", b.failures},
            {"convergence_value", opt(b.convergence_value)},
            {"detection_rate", opt(b.detection_rate)},
            {"false_positive_rate", opt(b.false_positive_rate)},
            {"precision", opt(b.precision)},
            {"f_score", opt(b.f_score)},
            {"soft_recovered_pct", opt(b.soft_recovered_pct)}};
  return json{{"runs", std::move(runs)}, {"mean", std::move(mean)}}.dump(2) + "\n";
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Neuro-fuzzy horizontal anomaly detection"};
  app.name("nhad");
  app.require_subcommand(1);

  SyntheticConfig gen;
  std::filesystem::path gen_out = ".";
  auto* g = app.add_subcommand("generate", "Write a labelled synthetic network (activity.csv, labels.csv)");
  add_synthetic_flags(*g, gen);
  g->add_option("--out", gen_out, "Output directory")->capture_default_str();

  DetectOptions det;
  std::string det_format = "json";
  auto* d = app.add_subcommand("detect", "Run detection on activity or traffic records");
  auto* act = d->add_option("--activity", det.activity, "Activity CSV")->check(CLI::ExistingFile);
  d->add_option("--traffic", det.traffic, "Traffic summary CSV")->check(CLI::ExistingFile)->excludes(act);
  d->add_option("--mapping", det.mapping, "Traffic feature mapping file")->check(CLI::ExistingFile);
  d->add_option("--labels", det.labels, "Labels CSV; adds a metrics block")->check(CLI::ExistingFile);
  add_fis_flags(*d, det.rules, det.samples);
  add_threshold_flags(*d, det.thresholds, det.budget);
  d->add_option("--seed", det.seed, "Seed recorded in the report")->capture_default_str();
  d->add_option("--out", det.out, "Output directory")->capture_default_str();
  add_format_flag(*d, det_format);

  EvaluateOptions ev;
  std::string ev_format = "csv";
  auto* e = app.add_subcommand("evaluate", "Batch of seeded generate + detect runs with a metrics summary");
  add_synthetic_flags(*e, ev.synthetic);
  e->add_option("--runs", ev.runs, "Number of runs; seeds are seed, seed+1, ...")->capture_default_str();
  add_fis_flags(*e, ev.rules, ev.samples);
  add_threshold_flags(*e, ev.thresholds, ev.budget);
  e->add_option("--out", ev.out, "Output directory")->capture_default_str();
  add_format_flag(*e, ev_format);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    return app.exit(ex, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (g->parsed()) {
      cmd_generate(gen, gen_out);
      out << "wrote " << (gen_out / "activity.csv").string() << " and " << (gen_out / "labels.csv").string()
          << '\n';
      return kOk;
    }
    if (d->parsed()) {
      det.format = report_format_from_string(det_format);
      return cmd_detect(det, out);
    }
    ev.format = report_format_from_string(ev_format);
    const auto result = cmd_evaluate(ev);
    out << format_summary_csv(result);
    return kOk;
  } catch (const nhad::Error& ex) {
    err << "error: " << ex.what() << '\n';
    return kUsage;
  }
}

}  // namespace nhad::cli
