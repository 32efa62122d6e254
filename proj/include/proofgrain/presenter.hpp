#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "proofgrain/labeler.hpp"

namespace proofgrain {

enum class StepKind { EqualitySplit, HypothesisIntro, Derive, BranchClose, Qed };

inline std::string_view to_string(StepKind k) {
  switch (k) {
    case StepKind::EqualitySplit: return "equality-split";
    case StepKind::HypothesisIntro: return "hypothesis-intro";
    case StepKind::Derive: return "derive";
    case StepKind::BranchClose: return "branch-close";
    case StepKind::Qed: return "qed";
  }
  return "derive";
}

struct PresentationStep {
  std::size_t index = 0;  // 1-based
  StepKind kind = StepKind::Derive;
  Formula shown_formula;                  // a formula of the range's output sequent
  std::optional<Formula> assumption;      // hypothesis-intro: the new hypothesis
  std::optional<Formula> remaining_goal;  // branch-close: next open goal
  std::vector<std::string> mentioned_concepts;   // concept names; empty when unexplained
  std::vector<std::string> concept_phrases;      // their descriptions
  std::size_t first = 0;  // source inference ids first..last
  std::size_t last = 0;
};

struct Presentation {
  Formula theorem;
  std::vector<PresentationStep> steps;
};

namespace detail {

inline bool is_equality_split(const AssertionProof& proof, const Inference& inf) {
  if (inf.direction != Direction::Backward || inf.focus.in != "goal" || !inf.focus.position.path.empty())
    return false;
  if (proof.concept_of(inf).kind != ConceptKind::Definition) return false;
  return proof.input_of(inf).goal.is(Symbol::Equal);
}

inline std::string join_phrases(const std::vector<std::string>& items) {
  std::string s;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) s += (i + 1 == items.size()) ? " and " : ", ";
    s += items[i];
  }
  return s;
}

}  // namespace detail

// Presentation of inferences first..last as one step.
inline PresentationStep describe_range(const AssertionProof& proof, std::size_t first, std::size_t last,
                                       bool explained) {
  const Inference& fin = proof.at(last);
  PresentationStep step;
  step.first = first;
  step.last = last;
  const Sequent& out = fin.conclusion;
  step.shown_formula = out.goal;

  if (fin.closes_branch) {
    step.kind = last == proof.size() ? StepKind::Qed : StepKind::BranchClose;
    if (step.kind == StepKind::BranchClose) {
      const Inference& next = proof.at(last + 1);
      if (const Formula* f = proof.input_of(next).formula(next.focus.in))
        if (const Formula* g = f->subterm(next.focus.position)) step.remaining_goal = *g;
    }
  } else if (fin.introduces_hypothesis) {
    step.kind = StepKind::HypothesisIntro;
    const Sequent& in = proof.input_of(fin);
    for (const auto& h : out.hypotheses)
      if (!in.hypothesis(h.label)) {
        step.assumption = h.formula;
        break;
      }
  } else if (detail::is_equality_split(proof, fin)) {
    step.kind = StepKind::EqualitySplit;
  } else {
    step.kind = StepKind::Derive;
    if (const Formula* f = out.formula(fin.result.in)) step.shown_formula = *f;
  }

  if (explained) {
    for (std::size_t id = first; id <= last; ++id) {
      const Concept& c = proof.concept_of(proof.at(id));
      if (std::find(step.mentioned_concepts.begin(), step.mentioned_concepts.end(), c.name) ==
          step.mentioned_concepts.end()) {
        step.mentioned_concepts.push_back(c.name);
        step.concept_phrases.push_back(c.description);
      }
    }
  }
  return step;
}

// One step per boundary, skipping inferences labeled too small.
inline Presentation present(const LabeledProof& labeled) {
  Presentation p;
  p.theorem = labeled.proof.theorem;
  std::size_t prev = 0;
  for (std::size_t last : labeled.boundaries) {
    PresentationStep step = describe_range(labeled.proof, prev + 1, last,
                                           labeled.label(last) == StepLabel::AppropriateWithExplanation);
    step.index = p.steps.size() + 1;
    p.steps.push_back(std::move(step));
    prev = last;
  }
  return p;
}

// Sentence for a single step, without its number.
inline std::string render_step(const PresentationStep& s) {
  std::string line;
  const std::string because = detail::join_phrases(s.concept_phrases);
  switch (s.kind) {
    case StepKind::EqualitySplit:
      if (s.shown_formula.is(Symbol::And))
        line = "We show that " + to_string(s.shown_formula.args[0]) + " and " + to_string(s.shown_formula.args[1]);
      else
        line = "We show that " + to_string(s.shown_formula);
      if (!because.empty()) line += " ...because of " + because;
      return line;
    case StepKind::HypothesisIntro:
      line = "We assume " + (s.assumption ? to_string(*s.assumption) : std::string("the hypothesis")) +
             " and show " + to_string(s.shown_formula);
      break;
    case StepKind::Derive:
      line = "Therefore, " + to_string(s.shown_formula);
      break;
    case StepKind::BranchClose:
      line = "We are done with the current part of the proof.";
      if (s.remaining_goal) line += " It remains to be shown that " + to_string(*s.remaining_goal) + ".";
      break;
    case StepKind::Qed:
      line = "This finishes the proof. Q.E.D.";
      break;
  }
  if (!because.empty()) line += " ...by " + because;
  return line;
}

enum class PresentationFormat { Text, Structured };

inline std::string render_text(const Presentation& p, PresentationFormat format = PresentationFormat::Text) {
  if (format == PresentationFormat::Text) {
    std::string out;
    for (const auto& s : p.steps) out += std::to_string(s.index) + ". " + render_step(s) + "\n";
    return out;
  }
  nlohmann::ordered_json root;
  root["theorem"] = to_string(p.theorem);
  auto steps = nlohmann::ordered_json::array();
  for (const auto& s : p.steps) {
    nlohmann::ordered_json j;
    j["index"] = s.index;
    j["kind"] = std::string(to_string(s.kind));
    j["shown_formula"] = to_string(s.shown_formula);
    j["shown_formula_tree"] = formula_to_json<nlohmann::ordered_json>(s.shown_formula);
    if (s.assumption) j["assumption"] = to_string(*s.assumption);
    if (s.remaining_goal) j["remaining_goal"] = to_string(*s.remaining_goal);
    j["mentioned_concepts"] = s.mentioned_concepts;
    j["source_ids"] = {s.first, s.last};
    j["text"] = render_step(s);
    steps.push_back(std::move(j));
  }
  root["steps"] = std::move(steps);
  return root.dump(2) + "\n";
}

}  // namespace proofgrain
