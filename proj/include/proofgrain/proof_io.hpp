#pragma once

#include <set>
#include <string>
#include <string_view>

#include "json.hpp"
#include "proofgrain/error.hpp"
#include "proofgrain/proof.hpp"

namespace proofgrain {

namespace detail {

using ojson = nlohmann::ordered_json;

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
      ++col;
    }
  }
  return {line, col};
}

[[noreturn]] inline void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

inline const ojson& member(const ojson& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing key '") + key + "'");
  return *it;
}

inline Formula read_formula(const ojson& j, const std::string& where) {
  try {
    return formula_from_json(j);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

inline Sequent read_sequent(const ojson& j, const std::string& where) {
  Sequent s;
  s.goal = read_formula(member(j, "goal", where), where + ".goal");
  if (auto it = j.find("hypotheses"); it != j.end()) {
    if (!it->is_array()) fail(where + ".hypotheses", "expected an array");
    std::size_t i = 0;
    for (const auto& h : *it) {
      const std::string w = where + ".hypotheses[" + std::to_string(i++) + "]";
      const auto& label = member(h, "label", w);
      if (!label.is_string()) fail(w + ".label", "expected a string");
      s.hypotheses.push_back({label.get<std::string>(), read_formula(member(h, "formula", w), w + ".formula")});
    }
  }
  return s;
}

inline Focus read_focus(const ojson& j, const std::string& where) {
  Focus f;
  if (!j.is_object()) fail(where, "expected an object");
  if (auto it = j.find("in"); it != j.end()) {
    if (!it->is_string()) fail(where + ".in", "expected a string");
    f.in = it->get<std::string>();
  }
  if (auto it = j.find("path"); it != j.end()) {
    if (!it->is_array()) fail(where + ".path", "expected an array");
    for (const auto& p : *it) {
      if (!p.is_number_unsigned()) fail(where + ".path", "expected non-negative integers");
      f.position.path.push_back(p.get<std::size_t>());
    }
  }
  return f;
}

inline bool read_bool(const ojson& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return false;
  if (!it->is_boolean()) fail(where + "." + key, "expected a boolean");
  return it->get<bool>();
}

inline bool valid_feature_name(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c == '<' || c == '>' || c == '=' || c == ':' || c == ',' || c == ' ' || c == '\t' ||
        c == '(' || c == ')' || c == '#')
      return false;
  return true;
}

}  // namespace detail

// Reads a proof document without checking proof invariants (see validate).
// Throws ParseError on syntax errors, arity violations, unknown concept
// references and dangling premise references.
inline AssertionProof read_proof(std::string_view document) {
  using detail::fail;
  using detail::member;
  detail::ojson root;
  try {
    root = detail::ojson::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    auto [line, col] = detail::line_column(document, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError("syntax error", line, col);
  }
  if (!root.is_object()) fail("document", "expected an object");

  AssertionProof proof;
  proof.theorem = detail::read_formula(member(root, "theorem", "document"), "theorem");

  const auto& theories = member(root, "theories", "document");
  if (!theories.is_object()) fail("theories", "expected an object");
  std::set<std::string> feature_names;
  for (const auto& [theory, list] : theories.items()) {
    proof.theories.push_back(theory);
    if (!feature_names.insert(theory).second) fail("theories", "duplicate feature name '" + theory + "'");
    if (!detail::valid_feature_name(theory)) fail("theories", "invalid theory name '" + theory + "'");
    if (!list.is_array()) fail("theories." + theory, "expected an array");
    std::size_t i = 0;
    for (const auto& entry : list) {
      const std::string w = "theories." + theory + "[" + std::to_string(i++) + "]";
      Concept c;
      c.theory = theory;
      const auto& name = member(entry, "name", w);
      if (!name.is_string() || name.get<std::string>().empty()) fail(w + ".name", "expected a name");
      c.name = name.get<std::string>();
      if (proof.find_concept(c.name)) fail(w, "duplicate concept '" + c.name + "'");
      const std::string kind = entry.value("kind", std::string("definition"));
      if (kind == "definition") c.kind = ConceptKind::Definition;
      else if (kind == "lemma") c.kind = ConceptKind::Lemma;
      else if (kind == "theorem") c.kind = ConceptKind::Theorem;
      else fail(w + ".kind", "unknown concept kind '" + kind + "'");
      c.feature = entry.value("feature", c.name);
      c.description = entry.value("description", c.name);
      if (!detail::valid_feature_name(c.feature))
        fail(w, "concept '" + c.name + "' needs a feature name without blanks or <>=:,()#");
      if (!feature_names.insert(c.feature).second) fail(w, "duplicate feature name '" + c.feature + "'");
      proof.concepts.push_back(std::move(c));
    }
  }

  proof.initial_sequent = detail::read_sequent(member(root, "initial_sequent", "document"), "initial_sequent");

  const auto& infs = member(root, "inferences", "document");
  if (!infs.is_array()) fail("inferences", "expected an array");
  std::set<std::size_t> ids;
  for (const auto& j : infs)
    if (j.is_object() && j.contains("id") && j["id"].is_number_unsigned()) ids.insert(j["id"].get<std::size_t>());

  std::size_t i = 0;
  for (const auto& j : infs) {
    const std::string w = "inferences[" + std::to_string(i++) + "]";
    Inference inf;
    const auto& id = member(j, "id", w);
    if (!id.is_number_unsigned() || id.get<std::size_t>() == 0) fail(w + ".id", "expected an ordinal >= 1");
    inf.id = id.get<std::size_t>();

    const auto& concept_json = member(j, "concept", w);
    if (!concept_json.is_string()) fail(w + ".concept", "expected a string");
    inf.concept_name = concept_json.get<std::string>();
    if (!proof.find_concept(inf.concept_name)) fail(w + ".concept", "unknown concept '" + inf.concept_name + "'");

    const std::string dir = j.value("direction", std::string("forward"));
    if (dir == "forward") inf.direction = Direction::Forward;
    else if (dir == "backward") inf.direction = Direction::Backward;
    else fail(w + ".direction", "expected 'forward' or 'backward'");

    const auto& premises = member(j, "premises", w);
    if (!premises.is_array()) fail(w + ".premises", "expected an array");
    for (const auto& p : premises) {
      if (p.is_string()) {
        const auto ref = p.get<std::string>();
        if (ref == "initial") {
          inf.premises.emplace_back(InitialRef{});
        } else if (ref.rfind("out:", 0) == 0) {
          std::size_t target = 0;
          try {
            std::size_t used = 0;
            target = std::stoul(ref.substr(4), &used);
            if (used != ref.size() - 4) throw std::invalid_argument(ref);
          } catch (const std::exception&) {
            fail(w + ".premises", "malformed reference '" + ref + "'");
          }
          if (!ids.count(target)) fail(w + ".premises", "dangling premise reference '" + ref + "'");
          inf.premises.emplace_back(OutputRef{target});
        } else {
          fail(w + ".premises", "expected 'initial', 'out:<id>' or a sequent");
        }
      } else {
        inf.premises.emplace_back(detail::read_sequent(p, w + ".premises"));
      }
    }
    inf.conclusion = detail::read_sequent(member(j, "conclusion", w), w + ".conclusion");
    if (auto it = j.find("focus"); it != j.end()) inf.focus = detail::read_focus(*it, w + ".focus");
    inf.result = inf.focus;
    if (auto it = j.find("result"); it != j.end()) inf.result = detail::read_focus(*it, w + ".result");
    inf.introduces_hypothesis = detail::read_bool(j, "introduces_hypothesis", w);
    inf.closes_branch = detail::read_bool(j, "closes_branch", w);
    if (auto it = j.find("applicable_positions"); it != j.end()) {
      if (!it->is_number_integer()) fail(w + ".applicable_positions", "expected an integer");
      inf.applicable_positions = it->get<int>();
    }
    inf.branch = j.value("branch", std::string("main"));
    proof.inferences.push_back(std::move(inf));
  }
  return proof;
}

// Reads and validates; throws ValidationError listing every violation.
inline AssertionProof parse_proof(std::string_view document) {
  AssertionProof proof = read_proof(document);
  auto violations = validate(proof);
  if (!violations.empty()) {
    std::string msg;
    for (const auto& v : violations) msg += (msg.empty() ? "" : "; ") + v.to_string();
    throw ValidationError(msg);
  }
  return proof;
}

namespace detail {

inline ojson sequent_to_json(const Sequent& s) {
  ojson hyps = ojson::array();
  for (const auto& h : s.hypotheses)
    hyps.push_back({{"label", h.label}, {"formula", formula_to_json<ojson>(h.formula)}});
  return {{"hypotheses", hyps}, {"goal", formula_to_json<ojson>(s.goal)}};
}

inline ojson focus_to_json(const Focus& f) {
  return {{"in", f.in}, {"path", f.position.path}};
}

}  // namespace detail

inline std::string serialize_proof(const AssertionProof& proof) {
  using detail::ojson;
  ojson root;
  root["theorem"] = formula_to_json<ojson>(proof.theorem);
  ojson theories = ojson::object();
  for (const auto& t : proof.theories) theories[t] = ojson::array();
  for (const auto& c : proof.concepts) {
    ojson entry = {{"name", c.name}, {"kind", std::string(to_string(c.kind))}};
    if (c.feature != c.name) entry["feature"] = c.feature;
    if (c.description != c.name) entry["description"] = c.description;
    theories[c.theory].push_back(entry);
  }
  root["theories"] = theories;
  root["initial_sequent"] = detail::sequent_to_json(proof.initial_sequent);
  ojson infs = ojson::array();
  for (const auto& inf : proof.inferences) {
    ojson j;
    j["id"] = inf.id;
    j["concept"] = inf.concept_name;
    j["direction"] = std::string(to_string(inf.direction));
    ojson premises = ojson::array();
    for (const auto& p : inf.premises) {
      if (std::holds_alternative<InitialRef>(p)) premises.push_back("initial");
      else if (const auto* o = std::get_if<OutputRef>(&p)) premises.push_back("out:" + std::to_string(o->id));
      else premises.push_back(detail::sequent_to_json(std::get<Sequent>(p)));
    }
    j["premises"] = premises;
    j["conclusion"] = detail::sequent_to_json(inf.conclusion);
    j["focus"] = detail::focus_to_json(inf.focus);
    if (!(inf.result == inf.focus)) j["result"] = detail::focus_to_json(inf.result);
    j["introduces_hypothesis"] = inf.introduces_hypothesis;
    j["closes_branch"] = inf.closes_branch;
    j["applicable_positions"] = inf.applicable_positions;
    j["branch"] = inf.branch;
    infs.push_back(j);
  }
  root["inferences"] = infs;
  return root.dump(2) + "\n";
}

}  // namespace proofgrain
