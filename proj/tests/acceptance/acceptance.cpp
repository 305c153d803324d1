// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nhad/datagen.hpp"
#include "nhad/detector.hpp"
#include "nhad/error.hpp"
#include "nhad/fuzzy.hpp"
#include "nhad/healing.hpp"
#include "nhad/ingest.hpp"
#include "nhad/metrics.hpp"
#include "nhad/reputation.hpp"
#include "oracle.hpp"
#include "temp_dir.hpp"

using namespace nhad;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("%s criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

template <typename E>
bool throws(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const E&) {
    return true;
  } catch (...) {
    return false;
  }
  return false;
}

const fuzzy::FuzzyInferenceSystem& fis() {
  static const auto f = fuzzy::build_default_fis();
  return f;
}

// ---------------------------------------------------------------------------

void criterion_1() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const fuzzy::InputVector a{u(rng), u(rng), u(rng), u(rng), u(rng)};
    worst = std::max(worst, std::abs(fis().crisp(a) - oracle::mamdani_crisp(a, 100001)));
  }
  const double secs = seconds_since(t0);
  report(1, worst <= 1e-3 && secs < 5.0, "fuzzy output matches the dense-grid oracle on 1000 random inputs",
         fmt("max |diff| %.3g, %.2f s", worst, secs));
}

void criterion_2() {
  std::vector<double> flat(1001, 0.4);
  const fuzzy::MembershipFunction tri({{0.1, 0.0}, {0.3, 1.0}, {0.5, 0.0}});
  std::vector<double> peak(1001);
  for (std::size_t i = 0; i < peak.size(); ++i) peak[i] = tri.degree(static_cast<double>(i) / 1000.0);
  const bool constant = near(fuzzy::defuzzify_cog(flat, 0, 1), 0.5, 1e-9);
  const bool triangle = near(fuzzy::defuzzify_cog(peak, 0, 1), 0.3, 1e-9);
  const bool zero = throws<ZeroMass>([] { fuzzy::defuzzify_cog(std::vector<double>(1001, 0.0), 0, 1); });
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double mirror_err = 0.0;
  for (int k = 0; k < 100; ++k) {
    std::vector<double> c(1001);
    for (auto& v : c) v = u(rng);
    const std::vector<double> m(c.rbegin(), c.rend());
    mirror_err = std::max(mirror_err, std::abs(fuzzy::defuzzify_cog(c, 0, 1) + fuzzy::defuzzify_cog(m, 0, 1) - 1.0));
  }
  report(2, constant && triangle && zero && mirror_err <= 1e-9, "centroid defuzzification unit suite",
         fmt("constant %d, triangle %d, zero-mass %d, mirror err %.2g", constant, triangle, zero, mirror_err));
}

void criterion_3() {
  std::vector<std::string> bad;
  auto check = [&](const char* name, bool ok) {
    if (!ok) bad.push_back(name);
  };
  const auto rec = [](std::uint64_t o, std::uint64_t s, std::uint64_t e1, std::uint64_t e2) {
    return ActivityRecord{"u", "c", "s", o, s, e1, e2, {}};
  };
  check("theta 1", near(connectivity_constant(rec(5, 5, 0, 10), 1.0), 1.0, 1e-9));
  check("theta 0", near(connectivity_constant(rec(5, 5, 10, 10), 1.0), 0.0, 1e-9));
  check("theta 0.32", near(connectivity_constant(rec(4, 8, 2, 10), 0.8), 0.32, 1e-9));
  Network net;
  for (int c = 0; c < 10; ++c) {
    for (int i = 0; i < 100; ++i) net.add_user("u" + std::to_string(c * 100 + i), "c" + std::to_string(c));
  }
  check("gamma 9", near(gamma_for("u5", net), 9.0, 1e-9));
  check("gain 0", near(reputation_gain({0, 0, 0, 0, 0}), 0.0, 1e-9));
  check("gain 1", near(reputation_gain({1, 1, 1, 1, 1}), 1.0, 1e-9));
  check("gain 0.125", near(reputation_gain({0.5, 0, 0, 0, 0}), 0.125, 1e-9));
  const std::vector<double> flat{0.4, 0.4, 0.4};
  const std::vector<double> split{0.2, 0.8};
  check("ds 0", near(significant_difference(std::span<const double>(flat)), 0.0, 1e-9));
  check("ds 0.3", near(significant_difference(std::span<const double>(split)), 0.3, 1e-9));
  auto state = [](std::vector<double> h, std::size_t k) {
    ReputationState s;
    s.rg_history = std::move(h);
    s.source_count = s.rg_history.size();
    s.k_prime = k;
    return s;
  };
  check("community 1", near(community_healing_cost(std::vector{state({0.4, 0.4}, 0)}), 1.0, 1e-9));
  check("community 5.5355",
        near(community_healing_cost(std::vector{state({0.3}, 3), state({0.6}, 4)}), 2.0 + std::sqrt(12.5), 1e-9));
  check("user cost 0", user_healing_cost(0.0, 0, 5) == 0.0);
  check("user cost 1", user_healing_cost(0.5, 5, 5) == 1.0);
  // Arbitrary-precision reference value 0.468911749557100947986...
  check("user cost midpoint", near(user_healing_cost(0.25, 2, 4), 0.4689117495571009, 1e-4));
  check("final 0.6", near(final_cost(0.6, 1.0), 0.6, 1e-9));
  check("final 0", final_cost(0.37, 0.0) == 0.0);
  check("final 0.72", near(final_cost(0.8, 0.9), 0.72, 1e-9));
  std::string detail = bad.empty() ? "17 checks" : "failed:";
  for (const auto& b : bad) detail += " [" + b + "]";
  report(3, bad.empty(), "reputation, deviation, healing-cost and final-cost arithmetic", detail);
}

// ---------------------------------------------------------------------------
// Synthetic batches shared by criteria 4-6.

struct Level {
  double fraction;
  std::vector<RunMetrics> runs;
  BatchSummary summary;
  double max_seconds = 0.0;
};

std::vector<Level> run_batches() {
  std::vector<Level> levels;
  for (double fraction : {0.1, 0.2, 0.3}) {
    Level level{fraction, {}, {}, 0.0};
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto t0 = Clock::now();
      SyntheticConfig c;
      c.lambda = 100;
      c.n_communities = 10;
      c.anomaly_fraction = fraction;
      c.seed = seed;
      const auto net = generate(c);
      DetectionConfig dc;
      dc.seed = seed;
      const auto report = run_detection(net.records, net.network, fis(), dc);
      level.runs.push_back(evaluate_run(net.ground_truth, report));
      level.max_seconds = std::max(level.max_seconds, seconds_since(t0));
    }
    level.summary = summarize(level.runs);
    levels.push_back(std::move(level));
  }
  return levels;
}

void criterion_4(const std::vector<Level>& levels) {
  bool ok = true;
  std::string detail;
  for (const auto& l : levels) {
    const bool level_ok =
        l.summary.failures <= 2 && l.summary.accuracy && *l.summary.accuracy >= 0.975 && l.max_seconds <= 10.0;
    ok = ok && level_ok;
    detail += fmt("%s%.0f%%: mean acc %.4f, failures %zu, slowest run %.2f s", detail.empty() ? "" : "; ",
                  100 * l.fraction, l.summary.accuracy.value_or(-1), l.summary.failures, l.max_seconds);
  }
  report(4, ok, "synthetic detection accuracy at 10/20/30% anomalies", detail);
}

void criterion_5(const std::vector<Level>& levels) {
  bool ok = true;
  std::string detail;
  std::optional<double> prev;
  for (const auto& l : levels) {
    const auto pct = l.summary.soft_recovered_pct;
    ok = ok && pct && *pct >= 80.0 && (!prev || *pct <= *prev);
    prev = pct;
    detail += fmt("%s%.0f%%: %.2f%%", detail.empty() ? "" : ", ", 100 * l.fraction, pct.value_or(-1));
  }
  report(5, ok, "soft anomalies recovered >= 80% and non-increasing with anomaly share", detail);
}

void criterion_6(const std::vector<Level>& levels) {
  const auto lo = levels.front().summary.convergence_value;
  const auto hi = levels.back().summary.convergence_value;
  report(6, lo && hi && *lo < *hi, "convergence value lower at 10% than at 30% anomalies",
         fmt("%.3f vs %.3f", lo.value_or(-1), hi.value_or(-1)));
}

// ---------------------------------------------------------------------------
// Traffic replay: 9,900 ordinary flows and 100 injected flows from 25 hosts.

struct TrafficFixture {
  std::vector<TrafficRecord> rows;
  std::vector<bool> injected;
};

TrafficFixture make_traffic() {
  std::mt19937_64 rng(77);
  auto uni = [&](int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); };
  auto real = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  auto chance = [&](double p) { return std::bernoulli_distribution(p)(rng); };
  TrafficFixture f;
  auto add = [&](TrafficRecord r, bool bad) {
    f.rows.push_back(std::move(r));
    f.injected.push_back(bad);
  };

  // Ordinary hosts: 10.1.<k>.<h>, mostly talking to internal servers 10.0.x.y.
  for (int host = 0; host < 990; ++host) {
    const std::string src = "10.1." + std::to_string(host % 10) + "." + std::to_string(host / 10);
    for (int j = 0; j < 10; ++j) {
      const bool external = chance(0.02);
      const std::string dst = external ? "93.184." + std::to_string(uni(0, 9)) + "." + std::to_string(uni(1, 254))
                                       : "10.0." + std::to_string(uni(0, 3)) + "." + std::to_string(uni(1, 60));
      const auto packets = static_cast<std::uint64_t>(uni(5, 80));
      add({src, dst, packets, packets * static_cast<std::uint64_t>(uni(60, 1400)), real(0.2, 6.0),
           static_cast<std::uint32_t>(uni(0, 4)), chance(0.005), chance(0.01) ? 1u : 0u},
          false);
    }
  }
  // Injected hosts: spam floods to outside targets, then token-heavy bursts.
  for (int host = 0; host < 25; ++host) {
    const std::string src = "10.9.0." + std::to_string(host + 1);
    for (int j = 0; j < 2; ++j) {
      const auto packets = static_cast<std::uint64_t>(uni(150, 300));
      add({src, "203.0." + std::to_string(j) + "." + std::to_string(uni(1, 254)), packets, packets * 1200,
           real(20.0, 40.0), 4, true, 0},
          true);
    }
    for (int j = 0; j < 2; ++j) {
      const auto packets = static_cast<std::uint64_t>(uni(3, 6));
      add({src, "198.51." + std::to_string(j) + "." + std::to_string(uni(1, 254)), packets, packets * 600,
           real(80.0, 100.0), 3, false, packets * 2},
          true);
    }
  }
  return f;
}

void criterion_7() {
  const auto fixture = make_traffic();
  std::stringstream csv;
  write_traffic_csv(csv, fixture.rows);
  const auto rows = parse_traffic_csv(csv);

  auto mapping = default_property_mapping();
  mapping.allow_list = {"10."};
  const auto records = map_traffic_records(rows, mapping);
  const auto result = run_detection(records, fis(), DetectionConfig{});

  std::size_t inj = 0, inj_hit = 0, benign = 0, benign_hit = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto* v = result.find(rows[i].source_address);
    const bool flagged = v && predicted_positive(*v);
    if (fixture.injected[i]) {
      ++inj;
      inj_hit += flagged ? 1 : 0;
    } else {
      ++benign;
      benign_hit += flagged ? 1 : 0;
    }
  }
  const double dr = static_cast<double>(inj_hit) / static_cast<double>(inj);
  const double fpr = static_cast<double>(benign_hit) / static_cast<double>(benign);
  report(7, rows.size() == 10000 && inj == 100 && dr >= 0.99 && fpr <= 0.01,
         "traffic replay: injected rows detected, ordinary rows left alone",
         fmt("%zu rows, %zu injected, detection rate %.4f, false-positive rate %.4f", rows.size(), inj, dr, fpr));
}

// ---------------------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void criterion_8() {
  testing::TempDir dir;
  auto run = [&](const std::string& out) {
    const std::string cmd = std::string("\"") + NHAD_CLI_PATH + "\" evaluate --runs 5 --seed 42 --out \"" +
                            (dir / out).string() + "\" > \"" + (dir / (out + ".log")).string() + "\" 2>&1";
    return std::system(cmd.c_str());
  };
  const int a = run("a");
  const int b = run("b");
  const auto sa = slurp(dir / "a" / "summary.csv");
  const auto sb = slurp(dir / "b" / "summary.csv");
  report(8, a == 0 && b == 0 && !sa.empty() && sa == sb, "evaluate --runs 5 --seed 42 is byte-identical across runs",
         fmt("exit codes %d/%d, %zu bytes, identical %d", a, b, sa.size(), sa == sb));
}

double median_detection_seconds(double lambda) {
  SyntheticConfig c;
  c.lambda = lambda;
  c.anomaly_fraction = 0.1;
  c.seed = 123;
  const auto net = generate(c);
  std::vector<double> t;
  for (int i = 0; i < 3; ++i) {
    const auto t0 = Clock::now();
    const auto report = run_detection(net.records, net.network, fis(), DetectionConfig{});
    t.push_back(seconds_since(t0));
    if (report.verdicts.empty()) std::abort();
  }
  std::sort(t.begin(), t.end());
  return t[1];
}

void criterion_9() {
  const double small = median_detection_seconds(100);
  const double large = median_detection_seconds(1000);
  const double ratio = large / small;
  report(9, ratio <= 15.0, "detection time grows subquadratically with population",
         fmt("lambda 100: %.4f s, lambda 1000: %.4f s, ratio %.2f", small, large, ratio));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> simple{criterion_1, criterion_2, criterion_3};
  int id = 1;
  for (const auto& c : simple) {
    try {
      c();
    } catch (const std::exception& e) {
      report(id, false, "unexpected exception", e.what());
    }
    ++id;
  }
  try {
    const auto levels = run_batches();
    criterion_4(levels);
    criterion_5(levels);
    criterion_6(levels);
  } catch (const std::exception& e) {
    for (int k = 4; k <= 6; ++k) report(k, false, "unexpected exception", e.what());
  }
  const std::vector<std::pair<int, std::function<void()>>> rest{{7, criterion_7}, {8, criterion_8}, {9, criterion_9}};
  for (const auto& [k, c] : rest) {
    try {
      c();
    } catch (const std::exception& e) {
      report(k, false, "unexpected exception", e.what());
    }
  }
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
