#include "nhad/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "nhad/error.hpp"

namespace nhad::fuzzy {

namespace {

// Priority weights of p1..p5 used to rank level combinations.
constexpr std::array<double, kInputCount> kPriorityWeights{1.0, 0.9, 0.8, 0.7, 0.6};
constexpr std::array<double, 3> kLevelSeverity{0.0, 0.5, 1.0};

std::vector<double> sample_curve(const MembershipFunction& mf, double lower, double upper,
                                 std::size_t n) {
  std::vector<double> out(n);
  const double step = (upper - lower) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = mf.degree(lower + step * static_cast<double>(i));
  }
  return out;
}

}  // namespace

MembershipFunction::MembershipFunction(std::vector<Vertex> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 2) {
    throw PreconditionError("membership function needs at least 2 vertices");
  }
  bool any_positive = false;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const auto& v = vertices_[i];
    if (!std::isfinite(v.x) || !std::isfinite(v.mu)) {
      throw PreconditionError("membership vertex is not finite");
    }
    if (v.mu < 0.0 || v.mu > 1.0) {
      throw PreconditionError("membership degree outside [0,1]");
    }
    if (i > 0 && v.x < vertices_[i - 1].x) {
      throw PreconditionError("membership vertices must be ordered by x");
    }
    any_positive = any_positive || v.mu > 0.0;
  }
  if (!any_positive) {
    throw PreconditionError("membership function is identically zero");
  }
}

double MembershipFunction::degree(double x) const noexcept {
  if (x < vertices_.front().x || x > vertices_.back().x) {
    return 0.0;
  }
  auto it = std::lower_bound(vertices_.begin(), vertices_.end(), x,
                             [](const Vertex& v, double value) { return v.x < value; });
  if (it->x == x || it == vertices_.begin()) {
    return it->mu;
  }
  const Vertex& hi = *it;
  const Vertex& lo = *(it - 1);
  const double t = (x - lo.x) / (hi.x - lo.x);
  return lo.mu + t * (hi.mu - lo.mu);
}

double MembershipFunction::peak() const noexcept {
  auto it = std::max_element(vertices_.begin(), vertices_.end(),
                             [](const Vertex& a, const Vertex& b) { return a.mu < b.mu; });
  return it->x;
}

double membership_degree(const MembershipFunction& mf, double x) noexcept { return mf.degree(x); }

LinguisticVariable::LinguisticVariable(std::string name, double lower, double upper,
                                       std::vector<Term> terms)
    : name_(std::move(name)), lower_(lower), upper_(upper), terms_(std::move(terms)) {
  if (!(lower_ < upper_)) {
    throw PreconditionError("variable '" + name_ + "': lower limit must be below upper limit");
  }
  if (terms_.empty()) {
    throw PreconditionError("variable '" + name_ + "' has no terms");
  }
  std::set<std::string_view> seen;
  for (const auto& term : terms_) {
    if (!seen.insert(term.label).second) {
      throw PreconditionError("variable '" + name_ + "': duplicate term '" + term.label + "'");
    }
    if (term.membership.support_lower() < lower_ || term.membership.support_upper() > upper_) {
      throw PreconditionError("variable '" + name_ + "': term '" + term.label +
                              "' extends outside the domain");
    }
  }
}

std::optional<std::size_t> LinguisticVariable::term_index(std::string_view label) const noexcept {
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].label == label) return i;
  }
  return std::nullopt;
}

FuzzyInferenceSystem::FuzzyInferenceSystem(std::vector<LinguisticVariable> inputs,
                                           LinguisticVariable output, std::vector<FuzzyRule> rules,
                                           std::size_t samples)
    : inputs_(std::move(inputs)), output_(std::move(output)), rules_(std::move(rules)), samples_(samples) {
  if (inputs_.size() != kInputCount) {
    throw PreconditionError("fuzzy system needs exactly 5 inputs");
  }
  if (output_.lower() != 0.0 || output_.upper() != 1.0) {
    throw PreconditionError("output domain must be [0,1]");
  }
  if (rules_.empty()) {
    throw PreconditionError("rule base is empty");
  }
  if (samples_ < 2) {
    throw PreconditionError("need at least 2 output samples");
  }
  for (const auto& rule : rules_) {
    if (rule.antecedent.empty()) {
      throw PreconditionError("rule with empty antecedent");
    }
    if (rule.weight != 1.0) {
      throw PreconditionError("rule weights are fixed at 1.0");
    }
    if (rule.consequent >= output_.terms().size()) {
      throw UnknownLabel("rule consequent refers to a missing output term");
    }
    for (const auto& clause : rule.antecedent) {
      if (clause.input >= inputs_.size() || clause.term >= inputs_[clause.input].terms().size()) {
        throw UnknownLabel("rule antecedent refers to a missing input term");
      }
    }
  }
  term_curves_.reserve(output_.terms().size());
  for (const auto& term : output_.terms()) {
    term_curves_.push_back(sample_curve(term.membership, output_.lower(), output_.upper(), samples_));
  }
}

void FuzzyInferenceSystem::aggregate_into(const InputVector& activations,
                                          std::vector<double>& out) const {
  std::array<std::vector<double>, kInputCount> degrees;
  for (std::size_t i = 0; i < kInputCount; ++i) {
    const double a = activations[i];
    if (!std::isfinite(a) || a < 0.0 || a > 1.0) {
      throw PreconditionError("activation " + std::to_string(i + 1) + " outside [0,1]");
    }
    const auto terms = inputs_[i].terms();
    degrees[i].resize(terms.size());
    for (std::size_t t = 0; t < terms.size(); ++t) {
      degrees[i][t] = terms[t].membership.degree(a);
    }
  }

  // max over rules of min(strength_r, mu_t(x)) equals min(max_r strength_r, mu_t(x))
  // for rules sharing consequent t, so clip each output term once.
  std::vector<double> term_strength(output_.terms().size(), 0.0);
  for (const auto& rule : rules_) {
    double strength = 1.0;
    for (const auto& clause : rule.antecedent) {
      strength = std::min(strength, degrees[clause.input][clause.term]);
      if (strength == 0.0) break;
    }
    term_strength[rule.consequent] = std::max(term_strength[rule.consequent], strength * rule.weight);
  }
  if (std::all_of(term_strength.begin(), term_strength.end(), [](double s) { return s <= 0.0; })) {
    throw AllRulesSilent("no rule fires for the given activations");
  }

  out.assign(samples_, 0.0);
  for (std::size_t t = 0; t < term_strength.size(); ++t) {
    const double s = term_strength[t];
    if (s <= 0.0) continue;
    const auto& curve = term_curves_[t];
    for (std::size_t k = 0; k < samples_; ++k) {
      out[k] = std::max(out[k], std::min(s, curve[k]));
    }
  }
}

InferenceResult FuzzyInferenceSystem::infer(const InputVector& activations) const {
  InferenceResult result;
  aggregate_into(activations, result.aggregate);
  try {
    result.crisp = defuzzify_cog(result.aggregate, output_.lower(), output_.upper());
  } catch (const ZeroMass&) {
    throw AllRulesSilent("fired rules produce an empty output set");
  }
  return result;
}

double FuzzyInferenceSystem::crisp(const InputVector& activations) const {
  return infer(activations).crisp;
}

FuzzyInferenceSystem FuzzyInferenceSystem::with_rules(std::vector<FuzzyRule> rules) const {
  return FuzzyInferenceSystem(inputs_, output_, std::move(rules), samples_);
}

FuzzyInferenceSystem FuzzyInferenceSystem::with_samples(std::size_t samples) const {
  return FuzzyInferenceSystem(inputs_, output_, rules_, samples);
}

double defuzzify_cog(std::span<const double> curve, double lower, double upper) {
  if (curve.size() < 2) {
    throw PreconditionError("centroid needs at least 2 samples");
  }
  if (!(lower < upper)) {
    throw PreconditionError("centroid domain is empty");
  }
  const std::size_t n = curve.size();
  const double step = (upper - lower) / static_cast<double>(n - 1);
  double moment = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = curve[i];
    if (f < 0.0 || !std::isfinite(f)) {
      throw PreconditionError("curve samples must be finite and non-negative");
    }
    const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    const double x = lower + step * static_cast<double>(i);
    moment += w * x * f;
    mass += w * f;
  }
  if (mass <= 0.0) {
    throw ZeroMass("aggregate curve has zero area");
  }
  return std::clamp(moment / mass, lower, upper);
}

LinguisticVariable make_input_variable(std::string name, const InputSupports& s) {
  constexpr double lower = 0.0;
  constexpr double upper = 1.0;
  const double medium_peak = 0.5 * (s.medium.first + s.medium.second);
  const double high_top = std::min(s.medium.second, upper);

  std::vector<Term> terms;
  terms.push_back({"low", MembershipFunction({{lower, 1.0}, {s.medium.first, 1.0}, {s.low.second, 0.0}})});
  terms.push_back({"medium", MembershipFunction({{s.medium.first, 0.0}, {medium_peak, 1.0},
                                                 {s.medium.second, 0.0}})});
  std::vector<Vertex> high{{s.high.first, 0.0}, {high_top, 1.0}};
  if (high_top < upper) high.push_back({upper, 1.0});
  terms.push_back({"high", MembershipFunction(std::move(high))});
  return LinguisticVariable(std::move(name), lower, upper, std::move(terms));
}

std::vector<LinguisticVariable> make_default_input_variables() {
  std::vector<LinguisticVariable> inputs;
  for (std::size_t i = 0; i < kInputCount; ++i) {
    inputs.push_back(make_input_variable("p" + std::to_string(i + 1), kDefaultInputSupports[i]));
  }
  return inputs;
}

LinguisticVariable make_default_output_variable() {
  std::vector<Term> terms;
  for (std::size_t i = 0; i < kOutputLabels.size(); ++i) {
    const auto [lo, hi] = kDefaultOutputSupports[i];
    std::vector<Vertex> v;
    if (i == 0) {
      v = {{lo, 1.0}, {hi, 0.0}};
    } else if (i + 1 == kOutputLabels.size()) {
      v = {{lo, 0.0}, {hi, 1.0}};
    } else {
      v = {{lo, 0.0}, {0.5 * (lo + hi), 1.0}, {hi, 0.0}};
    }
    terms.push_back({std::string(kOutputLabels[i]), MembershipFunction(std::move(v))});
  }
  return LinguisticVariable("out", 0.0, 1.0, std::move(terms));
}

std::vector<FuzzyRule> generate_default_rules(const std::vector<LinguisticVariable>& inputs,
                                              const LinguisticVariable& output) {
  if (inputs.size() != kInputCount) {
    throw PreconditionError("rule generation needs exactly 5 inputs");
  }
  for (const auto& var : inputs) {
    for (auto label : kInputLabels) {
      if (!var.term_index(label)) {
        throw UnknownLabel("input '" + var.name() + "' lacks term '" + std::string(label) + "'");
      }
    }
  }
  double weight_sum = 0.0;
  for (double w : kPriorityWeights) weight_sum += w;

  std::vector<double> peaks;
  for (const auto& term : output.terms()) peaks.push_back(term.membership.peak());

  std::vector<FuzzyRule> rules;
  constexpr std::size_t combos = 3 * 3 * 3 * 3 * 3;
  rules.reserve(combos);
  for (std::size_t code = 0; code < combos; ++code) {
    FuzzyRule rule;
    std::size_t rest = code;
    double severity = 0.0;
    for (std::size_t i = 0; i < kInputCount; ++i) {
      const std::size_t level = rest % 3;
      rest /= 3;
      severity += kPriorityWeights[i] / weight_sum * kLevelSeverity[level];
      rule.antecedent.push_back({i, inputs[i].term_index(kInputLabels[level]).value()});
    }
    // Nearest peak; exact ties go to the milder term.
    std::size_t best = 0;
    for (std::size_t t = 1; t < peaks.size(); ++t) {
      if (std::abs(peaks[t] - severity) < std::abs(peaks[best] - severity) - 1e-12) best = t;
    }
    rule.consequent = best;
    rules.push_back(std::move(rule));
  }
  return rules;
}

FuzzyInferenceSystem build_default_fis(std::size_t samples) {
  auto inputs = make_default_input_variables();
  auto output = make_default_output_variable();
  auto rules = generate_default_rules(inputs, output);
  return FuzzyInferenceSystem(std::move(inputs), std::move(output), std::move(rules), samples);
}

}  // namespace nhad::fuzzy
