#include <fstream>
#include <set>
#include <sstream>

#include "nhad/error.hpp"
#include "nhad/fuzzy.hpp"

namespace nhad::fuzzy {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

struct Assignment {
  std::string variable;
  std::string label;
};

Assignment split_assignment(const std::string& token, std::size_t line) {
  const auto eq = token.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == token.size()) {
    throw ParseError("expected <variable>=<term>, got '" + token + "'", line);
  }
  return {token.substr(0, eq), token.substr(eq + 1)};
}

FuzzyRule parse_line(std::string_view text, std::size_t line,
                     std::span<const LinguisticVariable> inputs, const LinguisticVariable& output) {
  std::istringstream words{std::string(text)};
  std::vector<std::string> tokens;
  for (std::string w; words >> w;) tokens.push_back(w);

  if (tokens.size() < 4 || tokens.front() != "IF") {
    throw ParseError("rule must start with IF", line);
  }
  FuzzyRule rule;
  std::set<std::size_t> used;
  std::size_t pos = 1;
  while (true) {
    if (pos >= tokens.size()) throw ParseError("missing THEN", line);
    auto [var, label] = split_assignment(tokens[pos], line);
    std::optional<std::size_t> input;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (inputs[i].name() == var) input = i;
    }
    if (!input) throw UnknownLabel("line " + std::to_string(line) + ": unknown input '" + var + "'");
    auto term = inputs[*input].term_index(label);
    if (!term) {
      throw UnknownLabel("line " + std::to_string(line) + ": unknown term '" + label + "' for " + var);
    }
    if (!used.insert(*input).second) {
      throw ParseError("input '" + var + "' appears twice", line);
    }
    rule.antecedent.push_back({*input, *term});
    ++pos;
    if (pos >= tokens.size()) throw ParseError("missing THEN", line);
    if (tokens[pos] == "THEN") break;
    if (tokens[pos] != "AND") throw ParseError("expected AND or THEN, got '" + tokens[pos] + "'", line);
    ++pos;
  }
  ++pos;
  if (pos + 1 != tokens.size()) throw ParseError("expected a single consequent after THEN", line);
  auto [var, label] = split_assignment(tokens[pos], line);
  if (var != output.name()) {
    throw UnknownLabel("line " + std::to_string(line) + ": unknown output '" + var + "'");
  }
  auto term = output.term_index(label);
  if (!term) {
    throw UnknownLabel("line " + std::to_string(line) + ": unknown output term '" + label + "'");
  }
  rule.consequent = *term;
  return rule;
}

}  // namespace

std::vector<FuzzyRule> parse_rules(std::istream& in, std::span<const LinguisticVariable> inputs,
                                   const LinguisticVariable& output) {
  std::vector<FuzzyRule> rules;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto text = trim(raw);
    if (text.empty() || text.front() == '#') continue;
    rules.push_back(parse_line(text, line, inputs, output));
  }
  if (rules.empty()) {
    throw ParseError("empty rule base");
  }
  return rules;
}

std::vector<FuzzyRule> load_rules(const std::filesystem::path& path,
                                  std::span<const LinguisticVariable> inputs,
                                  const LinguisticVariable& output) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open rule file " + path.string());
  return parse_rules(in, inputs, output);
}

std::string format_rule(const FuzzyRule& rule, std::span<const LinguisticVariable> inputs,
                        const LinguisticVariable& output) {
  std::string out = "IF";
  for (std::size_t i = 0; i < rule.antecedent.size(); ++i) {
    const auto& c = rule.antecedent[i];
    out += i == 0 ? " " : " AND ";
    out += inputs[c.input].name() + "=" + inputs[c.input].terms()[c.term].label;
  }
  out += " THEN " + output.name() + "=" + output.terms()[rule.consequent].label;
  return out;
}

}  // namespace nhad::fuzzy
