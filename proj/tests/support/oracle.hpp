#pragma once

// Reference computations written from the model definitions, independent of the
// library code. Slow on purpose: closed-form memberships, dense grids.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace oracle {

// Low/medium/high supports per input, copied from the model description.
struct Supports {
  double low_hi, med_lo, med_hi, high_lo;
};
inline constexpr std::array<Supports, 5> kInputs{{
    {0.5, 0.4, 0.95, 0.9},
    {0.45, 0.2, 0.95, 0.9},
    {0.4, 0.1, 0.9, 0.8},
    {0.5, 0.4, 0.8, 0.7},
    {0.5, 0.2, 0.9, 0.6},
}};

// Output ranges, best to worst.
inline constexpr std::array<std::array<double, 2>, 7> kOutputs{{
    {0.0, 0.1}, {0.0, 0.2}, {0.1, 0.5}, {0.3, 0.7}, {0.5, 0.9}, {0.7, 1.0}, {0.8, 1.0}}};

inline double rising(double x, double a, double b) {
  if (x <= a) return 0.0;
  if (x >= b) return 1.0;
  return (x - a) / (b - a);
}

inline double falling(double x, double a, double b) { return 1.0 - rising(x, a, b); }

inline double triangle(double x, double a, double b) {
  const double m = 0.5 * (a + b);
  if (x <= a || x >= b) return 0.0;
  return x <= m ? (x - a) / (m - a) : (b - x) / (b - m);
}

// level 0 = low, 1 = medium, 2 = high
inline double input_degree(std::size_t input, int level, double x) {
  const auto& s = kInputs[input];
  switch (level) {
    case 0:
      return x < 0.0 ? 0.0 : falling(x, s.med_lo, s.low_hi);
    case 1:
      return triangle(x, s.med_lo, s.med_hi);
    default:
      return x > 1.0 ? 0.0 : rising(x, s.high_lo, std::min(s.med_hi, 1.0));
  }
}

inline double output_degree(std::size_t term, double x) {
  const auto [a, b] = kOutputs[term];
  if (x < 0.0 || x > 1.0) return 0.0;
  if (term == 0) return falling(x, a, b);
  if (term == 6) return rising(x, a, b);
  return triangle(x, a, b);
}

inline double output_peak(std::size_t term) {
  if (term == 0) return 0.0;
  if (term == 6) return 1.0;
  return 0.5 * (kOutputs[term][0] + kOutputs[term][1]);
}

// Nearest output peak to the priority-weighted severity; ties go to the milder term.
inline std::size_t consequent(const std::array<int, 5>& levels) {
  constexpr std::array<double, 5> w{1.0, 0.9, 0.8, 0.7, 0.6};
  double num = 0.0;
  for (std::size_t d = 0; d < 5; ++d) num += w[d] * 0.5 * levels[d];
  const double severity = num / 4.0;
  std::size_t best = 0;
  for (std::size_t t = 1; t < 7; ++t) {
    if (std::abs(output_peak(t) - severity) < std::abs(output_peak(best) - severity) - 1e-12) best = t;
  }
  return best;
}

// Mamdani min/max evaluation on an n-point grid with trapezoidal centroid.
// Returns NaN when every rule is silent.
inline double mamdani_crisp(const std::array<double, 5>& a, std::size_t n = 100001) {
  std::array<double, 7> strength{};
  std::array<int, 5> lv{};
  for (int r = 0; r < 243; ++r) {
    int code = r;
    double s = 1.0;
    for (std::size_t d = 0; d < 5; ++d) {
      lv[d] = code % 3;
      code /= 3;
      s = std::min(s, input_degree(d, lv[d], a[d]));
    }
    auto& slot = strength[consequent(lv)];
    slot = std::max(slot, s);
  }
  double num = 0.0;
  double den = 0.0;
  const double h = 1.0 / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) * h;
    double f = 0.0;
    for (std::size_t t = 0; t < 7; ++t) f = std::max(f, std::min(strength[t], output_degree(t, x)));
    const double wgt = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    num += wgt * x * f;
    den += wgt * f;
  }
  return den > 0.0 ? num / den : std::nan("");
}

inline double population_std(const std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

inline double user_cost(double d_s, double k_prime, double k_total) {
  const double v = 0.5 * std::expm1(d_s) / std::expm1(0.5) + 0.5 * k_prime / k_total;
  return std::clamp(v, 0.0, 1.0);
}

}  // namespace oracle
