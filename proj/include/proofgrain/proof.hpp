#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "proofgrain/error.hpp"
#include "proofgrain/formula.hpp"

namespace proofgrain {

enum class ConceptKind { Definition, Lemma, Theorem };

inline std::string_view to_string(ConceptKind k) {
  switch (k) {
    case ConceptKind::Definition: return "definition";
    case ConceptKind::Lemma: return "lemma";
    case ConceptKind::Theorem: return "theorem";
  }
  return "definition";
}

// A mathematical fact an inference can be justified by.
struct Concept {
  std::string name;
  std::string theory;
  ConceptKind kind = ConceptKind::Definition;
  std::string feature;      // name of its count feature; defaults to `name`
  std::string description;  // phrase used when the concept is mentioned; defaults to `name`

  friend bool operator==(const Concept&, const Concept&) = default;
};

struct Hypothesis {
  std::string label;
  Formula formula;
  friend bool operator==(const Hypothesis&, const Hypothesis&) = default;
};

struct Sequent {
  std::vector<Hypothesis> hypotheses;
  Formula goal;

  // "goal" addresses the succedent, anything else a hypothesis label.
  const Formula* formula(std::string_view label) const {
    if (label == "goal") return &goal;
    for (const auto& h : hypotheses)
      if (h.label == label) return &h.formula;
    return nullptr;
  }
  const Hypothesis* hypothesis(std::string_view label) const {
    for (const auto& h : hypotheses)
      if (h.label == label) return &h;
    return nullptr;
  }

  friend bool operator==(const Sequent&, const Sequent&) = default;
};

enum class Direction { Forward, Backward };

inline std::string_view to_string(Direction d) {
  return d == Direction::Forward ? "forward" : "backward";
}

// Location of a rewrite: a formula of a sequent (goal or hypothesis label)
// and a position inside it.
struct Focus {
  std::string in = "goal";
  Position position;
  friend bool operator==(const Focus&, const Focus&) = default;
};

struct InitialRef {
  friend bool operator==(const InitialRef&, const InitialRef&) = default;
};
struct OutputRef {
  std::size_t id = 0;
  friend bool operator==(const OutputRef&, const OutputRef&) = default;
};
using Premise = std::variant<InitialRef, OutputRef, Sequent>;

struct Inference {
  std::size_t id = 0;
  std::string concept_name;
  Direction direction = Direction::Forward;
  std::vector<Premise> premises;
  Sequent conclusion;
  Focus focus;    // in the first premise
  Focus result;   // in the conclusion; where the rewritten subterm ends up
  bool introduces_hypothesis = false;
  bool closes_branch = false;
  int applicable_positions = 1;
  std::string branch;

  friend bool operator==(const Inference&, const Inference&) = default;
};

struct AssertionProof {
  Formula theorem;
  std::vector<std::string> theories;  // declaration order
  std::vector<Concept> concepts;
  Sequent initial_sequent;
  std::vector<Inference> inferences;

  std::size_t size() const { return inferences.size(); }

  // 1-based; assumes contiguous ids.
  const Inference& at(std::size_t id) const { return inferences.at(id - 1); }

  const Concept* find_concept(std::string_view name) const {
    for (const auto& c : concepts)
      if (c.name == name) return &c;
    return nullptr;
  }

  const Concept& concept_of(const Inference& inf) const {
    const Concept* c = find_concept(inf.concept_name);
    if (!c) throw Error("unknown concept '" + inf.concept_name + "'");
    return *c;
  }

  // Resolves a premise to the sequent it denotes, nullptr if dangling.
  const Sequent* resolve(const Premise& p) const {
    if (std::holds_alternative<InitialRef>(p)) return &initial_sequent;
    if (const auto* o = std::get_if<OutputRef>(&p)) {
      for (const auto& inf : inferences)
        if (inf.id == o->id) return &inf.conclusion;
      return nullptr;
    }
    return &std::get<Sequent>(p);
  }

  const Sequent& input_of(const Inference& inf) const {
    if (inf.premises.empty()) return initial_sequent;
    const Sequent* s = resolve(inf.premises.front());
    return s ? *s : initial_sequent;
  }

  friend bool operator==(const AssertionProof&, const AssertionProof&) = default;
};

// ---------------------------------------------------------------------------
// Branch segments: maximal runs of consecutive inferences on one branch.

struct Segment {
  std::size_t first = 0;  // inference ids, inclusive
  std::size_t last = 0;
  std::string branch;
};

inline std::vector<Segment> segments(const AssertionProof& proof) {
  std::vector<Segment> out;
  for (std::size_t i = 0; i < proof.inferences.size(); ++i) {
    const auto& inf = proof.inferences[i];
    if (out.empty() || out.back().branch != inf.branch)
      out.push_back({i + 1, i + 1, inf.branch});
    else
      out.back().last = i + 1;
  }
  return out;
}

// True when inference `id` begins a branch segment other than the first.
inline bool starts_segment(const AssertionProof& proof, std::size_t id) {
  return id > 1 && proof.at(id).branch != proof.at(id - 1).branch;
}

// True when inference `id` is the last of its branch segment.
inline bool ends_segment(const AssertionProof& proof, std::size_t id) {
  return id == proof.size() || proof.at(id + 1).branch != proof.at(id).branch;
}

// ---------------------------------------------------------------------------
// Compound steps

// A contiguous run of inferences first..last on a single branch, viewed
// through the proof it belongs to.
struct CompoundStep {
  std::size_t first = 1;
  std::size_t last = 1;
  const Sequent* input = nullptr;
  const Sequent* output = nullptr;

  std::size_t size() const { return last - first + 1; }
};

// Inferences boundary+1..n. Throws if the range crosses a branch boundary.
inline CompoundStep compound_range(const AssertionProof& proof, std::size_t boundary, std::size_t n) {
  if (!(boundary < n && n <= proof.size()))
    throw Error("compound range " + std::to_string(boundary) + ".." + std::to_string(n) +
                " out of bounds for a proof of " + std::to_string(proof.size()) + " inferences");
  for (std::size_t id = boundary + 2; id <= n; ++id)
    if (starts_segment(proof, id))
      throw Error("compound range " + std::to_string(boundary + 1) + ".." + std::to_string(n) +
                  " crosses a branch boundary at inference " + std::to_string(id));
  const auto& first = proof.at(boundary + 1);
  return {boundary + 1, n, &proof.input_of(first), &proof.at(n).conclusion};
}

// ---------------------------------------------------------------------------
// Structural validation

struct Violation {
  std::size_t id = 0;  // 0 for proof-level violations
  std::string invariant;
  std::string message;

  std::string to_string() const {
    return (id ? "inference " + std::to_string(id) + ": " : std::string("proof: ")) + invariant +
           (message.empty() ? "" : " (" + message + ")");
  }
};

inline std::vector<Violation> validate(const AssertionProof& proof) {
  std::vector<Violation> out;
  auto report = [&](std::size_t id, std::string inv, std::string msg = {}) {
    out.push_back({id, std::move(inv), std::move(msg)});
  };

  // Sequent-level invariants.
  auto check_sequent = [&](std::size_t id, const Sequent& s) {
    std::set<std::string> labels;
    for (const auto& h : s.hypotheses) {
      if (h.label == "goal") report(id, "reserved hypothesis label", "'goal'");
      if (!labels.insert(h.label).second) report(id, "duplicate hypothesis label", h.label);
    }
  };
  check_sequent(0, proof.initial_sequent);

  std::set<std::string> declared_theories(proof.theories.begin(), proof.theories.end());
  for (const auto& c : proof.concepts)
    if (!declared_theories.count(c.theory))
      report(0, "unknown theory", c.name + " -> " + c.theory);

  if (proof.inferences.empty()) {
    report(0, "unclosed branch", "proof has no inferences");
    return out;
  }

  std::map<std::size_t, std::size_t> index_of;
  for (std::size_t i = 0; i < proof.inferences.size(); ++i) {
    const auto& inf = proof.inferences[i];
    if (inf.id != i + 1)
      report(inf.id, "non-contiguous id",
             "expected " + std::to_string(i + 1) + ", found " + std::to_string(inf.id));
    index_of.emplace(inf.id, i);
  }

  // Earlier conclusions, for inline premise matching.
  std::vector<const Sequent*> earlier{&proof.initial_sequent};

  for (std::size_t i = 0; i < proof.inferences.size(); ++i) {
    const auto& inf = proof.inferences[i];
    const std::size_t id = inf.id;
    if (!proof.find_concept(inf.concept_name)) report(id, "unknown concept", inf.concept_name);
    if (inf.applicable_positions < 1)
      report(id, "applicable_positions < 1", std::to_string(inf.applicable_positions));
    if (inf.premises.empty()) report(id, "missing premise");
    check_sequent(id, inf.conclusion);

    for (const auto& p : inf.premises) {
      if (const auto* o = std::get_if<OutputRef>(&p)) {
        auto it = index_of.find(o->id);
        if (it == index_of.end())
          report(id, "dangling premise reference", "out:" + std::to_string(o->id));
        else if (it->second >= i)
          report(id, "acyclicity violation", "premise out:" + std::to_string(o->id) + " is not earlier");
      } else if (const auto* s = std::get_if<Sequent>(&p)) {
        if (std::none_of(earlier.begin(), earlier.end(), [&](const Sequent* e) { return *e == *s; }))
          report(id, "dangling premise reference", "inline sequent matches no earlier sequent");
      }
    }

    const Sequent* input = inf.premises.empty() ? nullptr : proof.resolve(inf.premises.front());
    if (input) {
      const Formula* target = input->formula(inf.focus.in);
      if (!target || !target->subterm(inf.focus.position))
        report(id, "focus does not resolve", "in " + inf.focus.in);

      // introduces_hypothesis must agree with the hypothesis sets.
      bool added = false;
      for (const auto& h : inf.conclusion.hypotheses)
        if (!input->hypothesis(h.label)) added = true;
      if (added != inf.introduces_hypothesis)
        report(id, "introduces_hypothesis mismatch",
               added ? "conclusion adds a hypothesis" : "no hypothesis added");
    }
    const Formula* produced = inf.conclusion.formula(inf.result.in);
    if (!produced || !produced->subterm(inf.result.position))
      report(id, "result does not resolve", "in " + inf.result.in);

    if (inf.closes_branch) {
      const auto& c = inf.conclusion;
      bool matched = std::any_of(c.hypotheses.begin(), c.hypotheses.end(), [&](const Hypothesis& h) {
        return equal_modulo_associativity(h.formula, c.goal);
      });
      if (!matched) report(id, "closing goal matches no hypothesis");
    }
    earlier.push_back(&inf.conclusion);
  }

  // Branch structure: contiguous, and every segment closed or split.
  const auto segs = segments(proof);
  std::set<std::string> seen;
  for (const auto& seg : segs) {
    if (!seen.insert(seg.branch).second)
      report(seg.first, "non-contiguous branch", seg.branch);
    for (std::size_t id = seg.first; id < seg.last; ++id)
      if (proof.inferences[id - 1].closes_branch)
        report(id, "close before branch end", seg.branch);
    const auto& last = proof.inferences[seg.last - 1];
    if (last.closes_branch) continue;
    bool split = false;
    for (std::size_t j = seg.last; j < proof.inferences.size() && !split; ++j)
      for (const auto& p : proof.inferences[j].premises)
        if (const auto* o = std::get_if<OutputRef>(&p); o && o->id == last.id &&
            proof.inferences[j].branch != seg.branch)
          split = true;
    if (!split) report(last.id, "unclosed branch", seg.branch);
  }
  return out;
}

}  // namespace proofgrain
