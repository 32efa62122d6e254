#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "proofgrain/learner.hpp"
#include "proofgrain/proof_io.hpp"
#include "proofgrain/rules.hpp"

namespace pgtest {

namespace pg = proofgrain;

inline std::string fixture_path(const std::string& name) { return std::string(PROOFGRAIN_FIXTURES) + "/" + name; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline std::string fixture(const std::string& name) { return slurp(fixture_path(name)); }

inline pg::AssertionProof running() { return pg::parse_proof(fixture("running.proof")); }
inline pg::AssertionProof second() { return pg::parse_proof(fixture("second.proof")); }
inline pg::RuleSet hand_rules() { return pg::parse_ruleset(fixture("hand.rules")); }

// The published decision list without its two title lines.
inline std::string part_list_text() {
  std::string text = fixture("part-decision-list.txt");
  for (int i = 0; i < 2; ++i) text.erase(0, text.find('\n') + 1);
  return text;
}

inline std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
}

// ---------------------------------------------------------------------------
// Random valid proofs. Goals have the shape G_a ∧ (G_b ∨ G_c) so several
// positions exist; hypotheses are atoms. A proof is either one closed branch
// or a main segment split into 1..3 closed branches.

struct GenOptions {
  std::size_t min_k = 1;
  std::size_t max_k = 18;
  bool single_branch = false;
};

inline pg::Formula var(const std::string& n) { return pg::Formula::variable(n); }

inline pg::Formula shaped_goal(std::size_t i) {
  const std::string s = std::to_string(i);
  return pg::Formula::apply(pg::Symbol::And,
                            {var("G" + s), pg::Formula::apply(pg::Symbol::Or, {var("L" + s), var("R" + s)})});
}

inline std::vector<std::vector<std::size_t>> positions_of(const pg::Formula& f) {
  if (f.is_atom()) return {{}};
  return {{}, {0}, {1}, {1, 0}, {1, 1}};
}

inline pg::AssertionProof random_proof(std::mt19937_64& rng, GenOptions opt = {}) {
  pg::AssertionProof p;
  const std::size_t theories = uniform(rng, 1, 3);
  for (std::size_t t = 0; t < theories; ++t) p.theories.push_back("theory" + std::to_string(t));
  const std::size_t concepts = uniform(rng, 1, 6);
  for (std::size_t c = 0; c < concepts; ++c) {
    pg::Concept con;
    con.name = "c" + std::to_string(c);
    con.theory = p.theories[uniform(rng, 0, theories - 1)];
    con.kind = static_cast<pg::ConceptKind>(uniform(rng, 0, 2));
    con.feature = "f" + std::to_string(c);
    con.description = "concept " + std::to_string(c);
    p.concepts.push_back(con);
  }
  p.theorem = shaped_goal(0);
  p.initial_sequent.hypotheses.push_back({"h0", var("H0")});
  p.initial_sequent.goal = shaped_goal(0);

  const std::size_t k = uniform(rng, opt.min_k, opt.max_k);
  // Segment lengths: main first, then branches.
  std::vector<std::size_t> lengths;
  if (opt.single_branch || k < 2 || rng() % 3 == 0) {
    lengths.push_back(k);
  } else {
    const std::size_t main_len = uniform(rng, 1, k - 1);
    lengths.push_back(main_len);
    std::size_t rest = k - main_len;
    const std::size_t branches = std::min<std::size_t>(rest, uniform(rng, 1, 3));
    for (std::size_t b = 0; b < branches; ++b) {
      const std::size_t len = b + 1 == branches ? rest : uniform(rng, 1, rest - (branches - b - 1));
      lengths.push_back(len);
      rest -= len;
    }
  }

  std::size_t id = 0;
  std::size_t split = 0;
  for (std::size_t s = 0; s < lengths.size(); ++s) {
    const std::string branch = s == 0 ? "main" : "b" + std::to_string(s);
    const bool closes = s > 0 || lengths.size() == 1;
    for (std::size_t j = 0; j < lengths[s]; ++j) {
      ++id;
      pg::Inference inf;
      inf.id = id;
      inf.branch = branch;
      inf.concept_name = p.concepts[uniform(rng, 0, concepts - 1)].name;
      inf.direction = rng() % 2 ? pg::Direction::Forward : pg::Direction::Backward;
      inf.applicable_positions = static_cast<int>(uniform(rng, 1, 3));
      pg::Premise prem = pg::InitialRef{};
      if (j > 0) prem = pg::OutputRef{id - 1};
      else if (s > 0) prem = pg::OutputRef{split};
      inf.premises = {prem};
      const pg::Sequent& in = j == 0 && s == 0 ? p.initial_sequent : p.inferences[std::get<pg::OutputRef>(prem).id - 1].conclusion;

      // Focus: a goal position or a whole hypothesis.
      if (rng() % 3 == 0) {
        const auto& h = in.hypotheses[uniform(rng, 0, in.hypotheses.size() - 1)];
        inf.focus = {h.label, {}};
      } else {
        const auto ps = positions_of(in.goal);
        inf.focus = {"goal", {ps[uniform(rng, 0, ps.size() - 1)]}};
      }

      pg::Sequent out;
      out.hypotheses = in.hypotheses;
      inf.introduces_hypothesis = (j == 0 && s > 0) || rng() % 5 == 0;
      if (inf.introduces_hypothesis) out.hypotheses.push_back({"h" + std::to_string(id), var("P" + std::to_string(id))});
      inf.closes_branch = closes && j + 1 == lengths[s];
      if (inf.closes_branch) {
        out.goal = out.hypotheses[uniform(rng, 0, out.hypotheses.size() - 1)].formula;
      } else {
        out.goal = shaped_goal(id);
      }
      if (rng() % 4 == 0) {
        const auto& h = out.hypotheses[uniform(rng, 0, out.hypotheses.size() - 1)];
        inf.result = {h.label, {}};
      } else {
        const auto ps = positions_of(out.goal);
        inf.result = {"goal", {ps[uniform(rng, 0, ps.size() - 1)]}};
      }
      inf.conclusion = std::move(out);
      p.inferences.push_back(std::move(inf));
    }
    if (s == 0) split = id;
  }
  return p;
}

// Decision list over core features with thresholds in 0..3, up to `max_rules` rules plus a default.
inline pg::RuleSet random_rules(std::mt19937_64& rng, std::size_t max_rules = 5) {
  static const std::vector<std::string> features = {
      "total", "conceptsunique", "masteredconceptsunique", "unmasteredconceptsunique", "conceptsunseen",
      "hypintro", "close", "parapos", "samesub", "verb"};
  static const std::array<pg::Comparator, 5> ops = {pg::Comparator::LessEq, pg::Comparator::Less,
                                                    pg::Comparator::Equal, pg::Comparator::GreaterEq,
                                                    pg::Comparator::Greater};
  std::vector<pg::Rule> rules;
  const std::size_t n = uniform(rng, 0, max_rules);
  for (std::size_t r = 0; r < n; ++r) {
    pg::Rule rule;
    const std::size_t conds = uniform(rng, 1, 3);
    for (std::size_t c = 0; c < conds; ++c)
      rule.conditions.push_back({features[uniform(rng, 0, features.size() - 1)], ops[uniform(rng, 0, 4)],
                                 static_cast<int>(uniform(rng, 0, 3))});
    rule.verdict = pg::kVerdicts[uniform(rng, 0, 2)];
    rules.push_back(rule);
  }
  pg::Rule def;
  def.verdict = pg::kVerdicts[uniform(rng, 0, 2)];
  rules.push_back(def);
  return pg::RuleSet(rules);
}

// ---------------------------------------------------------------------------
// Oracles

// Written out by hand from the published list, evaluated top to bottom.
inline pg::Verdict part_oracle(int total, int parapos, int unmastered, int samesub, int hypintro) {
  if (total <= 2 && total > 0 && parapos <= 0) return pg::Verdict::Appropriate;
  if (total <= 2 && unmastered <= 0) return pg::Verdict::TooSmall;
  if (parapos <= 0 && samesub <= 0) return pg::Verdict::TooBig;
  if (unmastered <= 1 && hypintro <= 0) return pg::Verdict::Appropriate;
  return pg::Verdict::TooBig;
}

// Scans every rule in order and records the first whose conditions all hold.
inline pg::Verdict naive_classify(const pg::RuleSet& rs, const pg::FeatureVector& fv) {
  std::optional<pg::Verdict> first;
  for (const auto& rule : rs.rules()) {
    bool all = true;
    for (const auto& c : rule.conditions) {
      const int v = fv.at(c.feature);
      const int t = c.threshold;
      bool ok = false;
      if (c.op == pg::Comparator::LessEq) ok = !(v > t);
      if (c.op == pg::Comparator::Less) ok = v + 1 <= t;
      if (c.op == pg::Comparator::Equal) ok = !(v < t) && !(v > t);
      if (c.op == pg::Comparator::GreaterEq) ok = v + 1 > t;
      if (c.op == pg::Comparator::Greater) ok = !(v <= t);
      all = all && ok;
    }
    if (all && !first) first = rule.verdict;
  }
  return *first;
}

// Direct floating-point evaluation of (p_o - p_e) / (1 - p_e).
inline double kappa_oracle(const pg::Confusion& m) {
  double n = 0, diag = 0;
  double rows[3] = {0, 0, 0}, cols[3] = {0, 0, 0};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      n += static_cast<double>(m[i][j]);
      rows[i] += static_cast<double>(m[i][j]);
      cols[j] += static_cast<double>(m[i][j]);
      if (i == j) diag += static_cast<double>(m[i][j]);
    }
  const double po = diag / n;
  double pe = 0;
  for (int c = 0; c < 3; ++c) pe += (rows[c] / n) * (cols[c] / n);
  if (pe == 1.0) return 0.0;
  return (po - pe) / (1 - pe);
}

// Parapos from its wording: an inference with several applicable positions
// whose concept is not applied by another inference of the step, in the same
// direction, at a different position.
inline int parapos_oracle(const pg::AssertionProof& p, std::size_t first, std::size_t last) {
  int flag = 0;
  for (std::size_t a = first; a <= last; ++a) {
    const auto& x = p.at(a);
    if (x.applicable_positions <= 1) continue;
    std::size_t partners = 0;
    for (std::size_t b = first; b <= last; ++b) {
      const auto& y = p.at(b);
      if (a != b && y.concept_name == x.concept_name && y.direction == x.direction &&
          (y.focus.in != x.focus.in || y.focus.position.path != x.focus.position.path))
        ++partners;
    }
    if (partners == 0) flag = 1;
  }
  return flag;
}

// Fraction of instances whose class is the most frequent one.
inline double majority_baseline(const std::vector<pg::TrainingInstance>& data) {
  std::array<std::size_t, 3> c{};
  for (const auto& i : data) ++c[pg::class_index(i.verdict)];
  return static_cast<double>(std::max({c[0], c[1], c[2]})) / static_cast<double>(data.size());
}

// Corpus over five core features labeled by the published list, each label
// replaced by a different class with probability `noise`.
inline std::vector<pg::TrainingInstance> synthetic_corpus(std::uint64_t seed, std::size_t n = 300,
                                                          double noise = 0.10) {
  std::mt19937_64 rng(seed);
  std::vector<pg::TrainingInstance> out;
  for (std::size_t i = 0; i < n; ++i) {
    const int total = static_cast<int>(uniform(rng, 1, 4));
    const int unmastered = static_cast<int>(uniform(rng, 0, 2));
    const int hypintro = static_cast<int>(uniform(rng, 0, 1));
    const int parapos = static_cast<int>(uniform(rng, 0, 1));
    const int samesub = static_cast<int>(uniform(rng, 0, 1));
    pg::Verdict v = part_oracle(total, parapos, unmastered, samesub, hypintro);
    if (static_cast<double>(rng() >> 11) * 0x1.0p-53 < noise) v = pg::kVerdicts[(pg::class_index(v) + uniform(rng, 1, 2)) % 3];
    pg::FeatureVector fv({{"total", total},
                          {"unmasteredconceptsunique", unmastered},
                          {"hypintro", hypintro},
                          {"parapos", parapos},
                          {"samesub", samesub}});
    out.push_back({fv, v, pg::Provenance::ExpertAnnotation});
  }
  return out;
}

}  // namespace pgtest
