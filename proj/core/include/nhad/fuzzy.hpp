#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nhad::fuzzy {

inline constexpr std::size_t kInputCount = 5;
inline constexpr std::size_t kDefaultSamples = 1001;

using InputVector = std::array<double, kInputCount>;

struct Vertex {
  double x = 0.0;
  double mu = 0.0;

  friend bool operator==(const Vertex&, const Vertex&) = default;
};

/// Piecewise-linear membership curve. Degree is 0 outside the vertex span.
class MembershipFunction {
 public:
  explicit MembershipFunction(std::vector<Vertex> vertices);

  double degree(double x) const noexcept;

  std::span<const Vertex> vertices() const noexcept { return vertices_; }
  double support_lower() const noexcept { return vertices_.front().x; }
  double support_upper() const noexcept { return vertices_.back().x; }
  /// x of the first vertex with the largest mu.
  double peak() const noexcept;

 private:
  std::vector<Vertex> vertices_;
};

double membership_degree(const MembershipFunction& mf, double x) noexcept;

struct Term {
  std::string label;
  MembershipFunction membership;
};

class LinguisticVariable {
 public:
  LinguisticVariable(std::string name, double lower, double upper, std::vector<Term> terms);

  const std::string& name() const noexcept { return name_; }
  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }
  std::span<const Term> terms() const noexcept { return terms_; }
  std::optional<std::size_t> term_index(std::string_view label) const noexcept;

 private:
  std::string name_;
  double lower_;
  double upper_;
  std::vector<Term> terms_;
};

struct Clause {
  std::size_t input = 0;  // index into the system inputs
  std::size_t term = 0;   // index into that input's terms

  friend bool operator==(const Clause&, const Clause&) = default;
};

struct FuzzyRule {
  std::vector<Clause> antecedent;
  std::size_t consequent = 0;  // index into the output terms
  double weight = 1.0;

  friend bool operator==(const FuzzyRule&, const FuzzyRule&) = default;
};

struct InferenceResult {
  std::vector<double> aggregate;  // f(x) at N uniform samples over the output domain
  double crisp = 0.0;
};

/// Mamdani system: min AND, min implication, max aggregation, centroid output.
/// Immutable after construction; `infer` is const and shares no mutable state.
class FuzzyInferenceSystem {
 public:
  FuzzyInferenceSystem(std::vector<LinguisticVariable> inputs, LinguisticVariable output,
                       std::vector<FuzzyRule> rules, std::size_t samples = kDefaultSamples);

  std::span<const LinguisticVariable> inputs() const noexcept { return inputs_; }
  const LinguisticVariable& output() const noexcept { return output_; }
  std::span<const FuzzyRule> rules() const noexcept { return rules_; }
  std::size_t samples() const noexcept { return samples_; }

  InferenceResult infer(const InputVector& activations) const;
  /// Same as `infer(...).crisp`.
  double crisp(const InputVector& activations) const;

  /// Copy of this system with a different rule base or sample count.
  FuzzyInferenceSystem with_rules(std::vector<FuzzyRule> rules) const;
  FuzzyInferenceSystem with_samples(std::size_t samples) const;

 private:
  void aggregate_into(const InputVector& activations, std::vector<double>& out) const;

  std::vector<LinguisticVariable> inputs_;
  LinguisticVariable output_;
  std::vector<FuzzyRule> rules_;
  std::size_t samples_;
  // Sampled output-term curves, one row of `samples_` values per term.
  std::vector<std::vector<double>> term_curves_;
};

/// Centroid of a curve sampled uniformly over [lower, upper], trapezoidal rule.
/// Throws ZeroMass when every sample is 0.
double defuzzify_cog(std::span<const double> curve, double lower, double upper);

/// Labels of the default output terms, ordered from best to worst behaviour.
inline constexpr std::array<std::string_view, 7> kOutputLabels{
    "perfect", "very_high", "high", "medium", "low", "very_low", "worst"};
inline constexpr std::array<std::string_view, 3> kInputLabels{"low", "medium", "high"};

/// Low/medium/high support triples for p1..p5.
struct InputSupports {
  std::pair<double, double> low;
  std::pair<double, double> medium;
  std::pair<double, double> high;
};
inline constexpr std::array<InputSupports, kInputCount> kDefaultInputSupports{{
    {{0.0, 0.5}, {0.4, 0.95}, {0.9, 1.0}},
    {{0.0, 0.45}, {0.2, 0.95}, {0.9, 1.0}},
    {{0.0, 0.4}, {0.1, 0.9}, {0.8, 1.0}},
    {{0.0, 0.5}, {0.4, 0.8}, {0.7, 1.0}},
    {{0.0, 0.5}, {0.2, 0.9}, {0.6, 1.0}},
}};
inline constexpr std::array<std::pair<double, double>, 7> kDefaultOutputSupports{{
    {0.0, 0.1}, {0.0, 0.2}, {0.1, 0.5}, {0.3, 0.7}, {0.5, 0.9}, {0.7, 1.0}, {0.8, 1.0}}};

/// Shoulder/triangle/shoulder terms built from the support triple of one input.
LinguisticVariable make_input_variable(std::string name, const InputSupports& supports);
LinguisticVariable make_default_output_variable();
std::vector<LinguisticVariable> make_default_input_variables();

/// Rule per low/medium/high combination (3^5 = 243), consequent chosen by the
/// priority-weighted severity of the combination.
std::vector<FuzzyRule> generate_default_rules(const std::vector<LinguisticVariable>& inputs,
                                              const LinguisticVariable& output);

FuzzyInferenceSystem build_default_fis(std::size_t samples = kDefaultSamples);

/// Rule-file grammar, one rule per line:
///   IF p<i>=<term> (AND p<j>=<term>)* THEN out=<term>
/// Blank lines and lines starting with '#' are ignored.
std::vector<FuzzyRule> parse_rules(std::istream& in, std::span<const LinguisticVariable> inputs,
                                   const LinguisticVariable& output);
std::vector<FuzzyRule> load_rules(const std::filesystem::path& path,
                                  std::span<const LinguisticVariable> inputs,
                                  const LinguisticVariable& output);
std::string format_rule(const FuzzyRule& rule, std::span<const LinguisticVariable> inputs,
                        const LinguisticVariable& output);

}  // namespace nhad::fuzzy
