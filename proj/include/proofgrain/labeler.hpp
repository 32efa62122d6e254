#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "proofgrain/features.hpp"
#include "proofgrain/proof.hpp"
#include "proofgrain/rules.hpp"
#include "proofgrain/student_model.hpp"

namespace proofgrain {

enum class StepLabel { AppropriateWithExplanation, AppropriateWithoutExplanation, TooSmall };

inline std::string_view to_string(StepLabel l) {
  switch (l) {
    case StepLabel::AppropriateWithExplanation: return "appropriate-with-explanation";
    case StepLabel::AppropriateWithoutExplanation: return "appropriate-without-explanation";
    case StepLabel::TooSmall: return "too-small";
  }
  return "too-small";
}

inline bool is_appropriate(StepLabel l) { return l != StepLabel::TooSmall; }

// One evaluation of the loop body, kept for tracing and tests.
struct LabelingEvent {
  enum class Action {
    Explained,        // labeled n appropriate with explanation
    Unexplained,      // labeled n appropriate without explanation
    TooSmall,         // labeled n too small
    PreviousClosed,   // too big: n-1 labeled appropriate, n re-evaluated
    SingletonForced,  // too big as a singleton: n labeled with explanation
    BranchFlush,      // forced boundary before a branch transition or at the end
  };
  std::size_t n = 0;
  std::size_t first = 0;  // compound first..n
  Verdict with_explanation = Verdict::Appropriate;
  Verdict without_explanation = Verdict::Appropriate;
  Action action = Action::Explained;
};

struct LabeledProof {
  AssertionProof proof;
  std::vector<StepLabel> labels;        // labels[id - 1]
  std::vector<std::size_t> boundaries;  // ids labeled appropriate-*, increasing
  StudentModel final_model;
  std::vector<StudentModel> models;     // model after each presented step
  std::vector<LabelingEvent> trace;
  std::size_t iterations = 0;

  StepLabel label(std::size_t id) const { return labels.at(id - 1); }
};

inline LabeledProof label_proof(const AssertionProof& proof, const RuleSet& rules, const StudentModel& initial,
                                const FeatureRegistry& registry = FeatureRegistry::core()) {
  using Action = LabelingEvent::Action;
  const std::size_t k = proof.size();
  LabeledProof out;
  out.proof = proof;
  out.labels.assign(k, StepLabel::TooSmall);
  StudentModel model = initial;
  std::size_t b = 0;

  auto verdicts = [&](const CompoundStep& c) {
    return std::pair{classify(rules, extract(c, proof, model, true, registry)),
                     classify(rules, extract(c, proof, model, false, registry))};
  };
  auto present = [&](std::size_t last, StepLabel label) {
    const CompoundStep c = compound_range(proof, b, last);
    out.labels[last - 1] = label;
    out.boundaries.push_back(last);
    model = observe(model, proof, c, label == StepLabel::AppropriateWithExplanation);
    out.models.push_back(model);
    b = last;
  };
  // Closes the pending compound b+1..end so no step spans a branch boundary.
  // The loop has just judged this compound too small, so it goes out
  // without explanation.
  auto flush = [&](std::size_t end) {
    if (b >= end) return;
    const CompoundStep c = compound_range(proof, b, end);
    auto [with, without] = verdicts(c);
    out.trace.push_back({end, b + 1, with, without, Action::BranchFlush});
    present(end, StepLabel::AppropriateWithoutExplanation);
  };

  std::size_t n = 1;
  while (n <= k) {
    if (starts_segment(proof, n)) flush(n - 1);
    ++out.iterations;
    const CompoundStep c = compound_range(proof, b, n);
    auto [with, without] = verdicts(c);
    LabelingEvent ev{n, b + 1, with, without, Action::Explained};

    if (with == Verdict::Appropriate) {
      present(n, StepLabel::AppropriateWithExplanation);
      ++n;
    } else if (with == Verdict::TooSmall && without == Verdict::Appropriate) {
      ev.action = Action::Unexplained;
      present(n, StepLabel::AppropriateWithoutExplanation);
      ++n;
    } else if (with == Verdict::TooSmall) {
      // (small, small) and (small, big): keep accumulating.
      ev.action = Action::TooSmall;
      out.labels[n - 1] = StepLabel::TooSmall;
      ++n;
    } else if (without == Verdict::Appropriate) {
      // Too big only because of the explanation.
      ev.action = Action::Unexplained;
      present(n, StepLabel::AppropriateWithoutExplanation);
      ++n;
    } else if (n - 1 > b) {
      ev.action = Action::PreviousClosed;
      present(n - 1, StepLabel::AppropriateWithoutExplanation);
    } else {
      ev.action = Action::SingletonForced;
      present(n, StepLabel::AppropriateWithExplanation);
      ++n;
    }
    out.trace.push_back(ev);
  }
  if (k > 0) flush(k);
  out.final_model = model;
  return out;
}

// One line per inference: id<TAB>concept<TAB>label
inline std::string dump_labels(const LabeledProof& lp) {
  std::string s;
  for (std::size_t id = 1; id <= lp.labels.size(); ++id)
    s += std::to_string(id) + "\t" + lp.proof.at(id).concept_name + "\t" + std::string(to_string(lp.label(id))) + "\n";
  return s;
}

}  // namespace proofgrain
