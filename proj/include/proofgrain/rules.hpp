#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "proofgrain/error.hpp"
#include "proofgrain/features.hpp"

namespace proofgrain {

// Granularity verdict. The declaration order is the tie-break class order.
enum class Verdict { Appropriate, TooSmall, TooBig };

inline constexpr std::array<Verdict, 3> kVerdicts{Verdict::Appropriate, Verdict::TooSmall, Verdict::TooBig};

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Appropriate: return "appropriate";
    case Verdict::TooSmall: return "step-too-small";
    case Verdict::TooBig: return "step-too-big";
  }
  return "appropriate";
}

inline std::optional<Verdict> verdict_from_string(std::string_view s) {
  for (auto v : kVerdicts)
    if (to_string(v) == s) return v;
  return std::nullopt;
}

enum class Comparator { LessEq, Less, Equal, GreaterEq, Greater };

inline std::string_view to_string(Comparator c) {
  switch (c) {
    case Comparator::LessEq: return "<=";
    case Comparator::Less: return "<";
    case Comparator::Equal: return "=";
    case Comparator::GreaterEq: return ">=";
    case Comparator::Greater: return ">";
  }
  return "=";
}

struct Condition {
  std::string feature;
  Comparator op = Comparator::LessEq;
  int threshold = 0;

  bool holds(int value) const {
    switch (op) {
      case Comparator::LessEq: return value <= threshold;
      case Comparator::Less: return value < threshold;
      case Comparator::Equal: return value == threshold;
      case Comparator::GreaterEq: return value >= threshold;
      case Comparator::Greater: return value > threshold;
    }
    return false;
  }

  std::string to_string() const {
    return feature + " " + std::string(proofgrain::to_string(op)) + " " + std::to_string(threshold);
  }

  friend bool operator==(const Condition&, const Condition&) = default;
};

// "(coverage/errors)" annotation carried along for provenance only.
struct RuleStats {
  double coverage = 0;
  std::optional<double> errors;
  friend bool operator==(const RuleStats&, const RuleStats&) = default;
};

struct Rule {
  std::vector<Condition> conditions;  // conjunction; empty only for the default
  Verdict verdict = Verdict::Appropriate;
  std::optional<RuleStats> stats;

  bool is_default() const { return conditions.empty(); }

  bool matches(const FeatureVector& fv) const {
    for (const auto& c : conditions) {
      auto v = fv.get(c.feature);
      if (!v) throw Error("feature vector lacks feature '" + c.feature + "' required by the rule set");
      if (!c.holds(*v)) return false;
    }
    return true;
  }

  friend bool operator==(const Rule&, const Rule&) = default;
};

// Ordered decision list ending in exactly one default rule.
class RuleSet {
 public:
  RuleSet() : rules_{Rule{}} {}

  explicit RuleSet(std::vector<Rule> rules) : rules_(std::move(rules)) {
    if (rules_.empty() || !rules_.back().is_default()) throw Error("missing default");
    for (std::size_t i = 0; i + 1 < rules_.size(); ++i)
      if (rules_[i].is_default()) throw Error("rule after default");
  }

  const std::vector<Rule>& rules() const { return rules_; }
  const Rule& default_rule() const { return rules_.back(); }

  std::set<std::string> features() const {
    std::set<std::string> out;
    for (const auto& r : rules_)
      for (const auto& c : r.conditions) out.insert(c.feature);
    return out;
  }

  // Index of the first rule whose conditions all hold.
  std::size_t match(const FeatureVector& fv) const {
    for (std::size_t i = 0; i < rules_.size(); ++i)
      if (rules_[i].matches(fv)) return i;
    return rules_.size() - 1;
  }

  friend bool operator==(const RuleSet&, const RuleSet&) = default;

 private:
  std::vector<Rule> rules_;
};

inline Verdict classify(const RuleSet& rules, const FeatureVector& fv) {
  for (const auto& f : rules.features())
    if (!fv.get(f)) throw Error("feature vector lacks feature '" + f + "' required by the rule set");
  return rules.rules()[rules.match(fv)].verdict;
}

// ---------------------------------------------------------------------------
// Text form, one rule per line:
//
//   rule := cond (" AND " cond)* ": " class (" (" num ("/" num)? ")")?
//   cond := ident op number        op ∈ {<=, <, =, >=, >}
//   ": " class                     the default, last
//
// Blank lines and '#' comments are ignored. Fractional thresholds are
// normalized to the equivalent integer comparison.

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::optional<double> parse_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::string str(s);
  char* end = nullptr;
  double v = std::strtod(str.c_str(), &end);
  if (end != str.c_str() + str.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline Condition make_condition(std::string feature, Comparator op, double t, std::size_t line) {
  const bool integral = std::floor(t) == t;
  if (std::fabs(t) > 1e9) throw ParseError("threshold out of range", line, 1);
  const int fl = static_cast<int>(std::floor(t));
  switch (op) {
    case Comparator::LessEq: return {std::move(feature), Comparator::LessEq, fl};
    case Comparator::Greater: return {std::move(feature), Comparator::Greater, fl};
    case Comparator::Less:
      return integral ? Condition{std::move(feature), Comparator::Less, fl}
                      : Condition{std::move(feature), Comparator::LessEq, fl};
    case Comparator::GreaterEq:
      return integral ? Condition{std::move(feature), Comparator::GreaterEq, fl}
                      : Condition{std::move(feature), Comparator::Greater, fl};
    case Comparator::Equal:
      if (!integral) throw ParseError("equality against a fractional threshold", line, 1);
      return {std::move(feature), Comparator::Equal, fl};
  }
  return {};
}

inline Condition parse_condition(std::string_view text, std::size_t line) {
  const std::string s = trim(text);
  std::size_t i = 0;
  while (i < s.size() && s[i] != ' ' && s[i] != '\t' && std::string_view("<>=!").find(s[i]) == std::string_view::npos)
    ++i;
  std::string feature = s.substr(0, i);
  if (feature.empty()) throw ParseError("syntax error: missing feature name in '" + s + "'", line, 1);
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  std::size_t j = i;
  while (j < s.size() && std::string_view("<>=!").find(s[j]) != std::string_view::npos) ++j;
  const std::string op = s.substr(i, j - i);
  if (op.empty()) throw ParseError("syntax error: missing comparator in '" + s + "'", line, 1);
  Comparator cmp;
  if (op == "<=") cmp = Comparator::LessEq;
  else if (op == "<") cmp = Comparator::Less;
  else if (op == "=") cmp = Comparator::Equal;
  else if (op == ">=") cmp = Comparator::GreaterEq;
  else if (op == ">") cmp = Comparator::Greater;
  else throw ParseError("unknown comparator '" + op + "'", line, i + 1);
  auto value = parse_number(trim(s.substr(j)));
  if (!value) throw ParseError("syntax error: expected a number in '" + s + "'", line, j + 1);
  return make_condition(std::move(feature), cmp, *value, line);
}

inline std::string format_stat(double v) {
  char buf[64];
  if (std::floor(v) == v && std::fabs(v) < 1e15) {
    std::snprintf(buf, sizeof buf, "%.1f", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.15g", v);
  }
  return buf;
}

}  // namespace detail

inline Rule parse_rule(std::string_view text, std::size_t line = 0) {
  const std::string s = detail::trim(text);
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw ParseError("syntax error: missing ': <class>'", line, 1);
  Rule rule;
  const std::string lhs = detail::trim(s.substr(0, colon));
  if (!lhs.empty()) {
    std::size_t start = 0;
    while (true) {
      const auto pos = lhs.find(" AND ", start);
      rule.conditions.push_back(detail::parse_condition(lhs.substr(start, pos - start), line));
      if (pos == std::string::npos) break;
      start = pos + 5;
    }
  }
  std::string rhs = detail::trim(s.substr(colon + 1));
  std::string cls = rhs;
  if (auto paren = rhs.find('('); paren != std::string::npos) {
    cls = detail::trim(rhs.substr(0, paren));
    if (rhs.back() != ')') throw ParseError("syntax error: unterminated statistics", line, colon + paren + 2);
    const std::string inner = rhs.substr(paren + 1, rhs.size() - paren - 2);
    RuleStats stats;
    const auto slash = inner.find('/');
    auto cov = detail::parse_number(detail::trim(inner.substr(0, slash)));
    if (!cov) throw ParseError("syntax error: bad statistics '" + inner + "'", line, colon + paren + 2);
    stats.coverage = *cov;
    if (slash != std::string::npos) {
      auto err = detail::parse_number(detail::trim(inner.substr(slash + 1)));
      if (!err) throw ParseError("syntax error: bad statistics '" + inner + "'", line, colon + paren + 2);
      stats.errors = *err;
    }
    rule.stats = stats;
  }
  auto verdict = verdict_from_string(cls);
  if (!verdict) throw ParseError("syntax error: unknown class '" + cls + "'", line, colon + 2);
  rule.verdict = *verdict;
  return rule;
}

inline RuleSet parse_ruleset(std::string_view text) {
  std::vector<Rule> rules;
  std::size_t lineno = 0;
  std::size_t start = 0;
  bool seen_default = false;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(start, end - start);
    start = end + 1;
    ++lineno;
    std::string line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    Rule r = parse_rule(line, lineno);
    if (seen_default) throw ParseError("rule after default", lineno, 1);
    seen_default = r.is_default();
    rules.push_back(std::move(r));
  }
  if (!seen_default) throw ParseError("missing default", lineno, 1);
  return RuleSet(std::move(rules));
}

inline std::string to_string(const Rule& r) {
  std::string s;
  for (std::size_t i = 0; i < r.conditions.size(); ++i) s += (i ? " AND " : "") + r.conditions[i].to_string();
  s += ": ";
  s += to_string(r.verdict);
  if (r.stats) {
    s += " (" + detail::format_stat(r.stats->coverage);
    if (r.stats->errors) s += "/" + detail::format_stat(*r.stats->errors);
    s += ")";
  }
  return s;
}

inline std::string serialize(const RuleSet& rs) {
  std::string out;
  for (const auto& r : rs.rules()) out += to_string(r) + "\n";
  return out;
}

}  // namespace proofgrain
