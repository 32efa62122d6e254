#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "proofgrain/error.hpp"
#include "proofgrain/proof.hpp"
#include "proofgrain/student_model.hpp"

namespace proofgrain {

// Named integer features in canonical order. Booleans are 0/1.
class FeatureVector {
 public:
  using Entry = std::pair<std::string, int>;

  FeatureVector() = default;
  explicit FeatureVector(std::vector<Entry> entries) : entries_(std::move(entries)) {}

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  std::optional<int> get(std::string_view name) const {
    for (const auto& [n, v] : entries_)
      if (n == name) return v;
    return std::nullopt;
  }

  int at(std::string_view name) const {
    if (auto v = get(name)) return *v;
    throw Error("feature vector has no feature '" + std::string(name) + "'");
  }

  void set(std::string_view name, int value) {
    for (auto& [n, v] : entries_)
      if (n == name) {
        v = value;
        return;
      }
    entries_.emplace_back(std::string(name), value);
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.first);
    return out;
  }

  std::string csv_header() const {
    std::string s;
    for (const auto& e : entries_) s += (s.empty() ? "" : ",") + e.first;
    return s;
  }
  std::string csv_row() const {
    std::string s;
    for (std::size_t i = 0; i < entries_.size(); ++i) s += (i ? "," : "") + std::to_string(entries_[i].second);
    return s;
  }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

 private:
  std::vector<Entry> entries_;
};

struct FeatureContext {
  const AssertionProof& proof;
  const CompoundStep& step;
  const StudentModel& model;
  bool verb;

  const Inference& inference(std::size_t id) const { return proof.at(id); }

  // Distinct concept names applied in the step, in first-application order.
  std::vector<std::string> concepts() const {
    std::vector<std::string> out;
    for (std::size_t id = step.first; id <= step.last; ++id) {
      const auto& c = proof.at(id).concept_name;
      if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
    }
    return out;
  }
};

using FeatureFn = std::function<int(const FeatureContext&)>;

namespace features {

inline int total(const FeatureContext& c) { return static_cast<int>(c.step.size()); }

inline int concepts_unique(const FeatureContext& c) { return static_cast<int>(c.concepts().size()); }

inline int mastered_unique(const FeatureContext& c) {
  int n = 0;
  for (const auto& name : c.concepts()) n += c.model.mastered(name) ? 1 : 0;
  return n;
}

inline int unmastered_unique(const FeatureContext& c) {
  return concepts_unique(c) - mastered_unique(c);
}

// Distinct concepts of the step with no application before the step starts.
inline int concepts_unseen(const FeatureContext& c) {
  std::set<std::string> before;
  for (std::size_t id = 1; id < c.step.first; ++id) before.insert(c.proof.at(id).concept_name);
  int n = 0;
  for (const auto& name : c.concepts()) n += before.count(name) ? 0 : 1;
  return n;
}

inline int hyp_intro(const FeatureContext& c) {
  for (std::size_t id = c.step.first; id <= c.step.last; ++id)
    if (c.inference(id).introduces_hypothesis) return 1;
  return 0;
}

inline int close(const FeatureContext& c) { return c.inference(c.step.last).closes_branch ? 1 : 0; }

// Some inference used one of several applicable positions, and no other
// inference of the step applied the same concept in the same direction
// elsewhere.
inline int parapos(const FeatureContext& c) {
  for (std::size_t id = c.step.first; id <= c.step.last; ++id) {
    const auto& a = c.inference(id);
    if (a.applicable_positions < 2) continue;
    bool covered = false;
    for (std::size_t other = c.step.first; other <= c.step.last && !covered; ++other) {
      if (other == id) continue;
      const auto& b = c.inference(other);
      covered = b.concept_name == a.concept_name && b.direction == a.direction && !(b.focus == a.focus);
    }
    if (!covered) return 1;
  }
  return 0;
}

// Each inference works inside the subterm its predecessor produced.
inline int same_sub(const FeatureContext& c) {
  for (std::size_t id = c.step.first + 1; id <= c.step.last; ++id) {
    const auto& pred = c.inference(id - 1);
    const auto& succ = c.inference(id);
    if (succ.focus.in != pred.result.in || !pred.result.position.is_prefix_of(succ.focus.position)) return 0;
  }
  return 1;
}

inline int verb(const FeatureContext& c) { return c.verb ? 1 : 0; }

}  // namespace features

// Ordered, name-keyed feature extractors. Concept and theory count features
// are appended per proof and are not registered here.
class FeatureRegistry {
 public:
  static const FeatureRegistry& core() {
    static const FeatureRegistry r = [] {
      FeatureRegistry reg;
      reg.add("total", features::total);
      reg.add("conceptsunique", features::concepts_unique);
      reg.add("masteredconceptsunique", features::mastered_unique);
      reg.add("unmasteredconceptsunique", features::unmastered_unique);
      reg.add("conceptsunseen", features::concepts_unseen);
      reg.add("hypintro", features::hyp_intro);
      reg.add("close", features::close);
      reg.add("parapos", features::parapos);
      reg.add("samesub", features::same_sub);
      reg.add("verb", features::verb);
      return reg;
    }();
    return r;
  }

  void add(std::string name, FeatureFn fn) {
    if (contains(name)) throw Error("feature '" + name + "' registered twice");
    entries_.emplace_back(std::move(name), std::move(fn));
  }

  bool contains(std::string_view name) const {
    return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == name; });
  }

  const std::vector<std::pair<std::string, FeatureFn>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, FeatureFn>> entries_;
};

// Feature names in canonical order: registered features, then concept
// features sorted by name, then theory features sorted by name.
inline std::vector<std::string> feature_schema(const AssertionProof& proof,
                                               const FeatureRegistry& registry = FeatureRegistry::core()) {
  std::vector<std::string> names;
  for (const auto& e : registry.entries()) names.push_back(e.first);
  std::vector<std::string> concepts, theories;
  for (const auto& c : proof.concepts) concepts.push_back(c.feature);
  theories = proof.theories;
  std::sort(concepts.begin(), concepts.end());
  std::sort(theories.begin(), theories.end());
  names.insert(names.end(), concepts.begin(), concepts.end());
  names.insert(names.end(), theories.begin(), theories.end());
  return names;
}

inline FeatureVector extract(const CompoundStep& step, const AssertionProof& proof, const StudentModel& model,
                             bool verb, const FeatureRegistry& registry = FeatureRegistry::core()) {
  for (std::size_t id = step.first; id <= step.last; ++id) {
    const auto& name = proof.at(id).concept_name;
    if (!model.covers(name)) throw Error("student model has no record for concept '" + name + "'");
  }
  const FeatureContext ctx{proof, step, model, verb};
  std::vector<FeatureVector::Entry> entries;
  for (const auto& [name, fn] : registry.entries()) entries.emplace_back(name, fn(ctx));

  std::vector<FeatureVector::Entry> concept_counts, theory_counts;
  for (const auto& c : proof.concepts) concept_counts.emplace_back(c.feature, 0);
  for (const auto& t : proof.theories) theory_counts.emplace_back(t, 0);
  auto bump = [](std::vector<FeatureVector::Entry>& v, const std::string& name) {
    for (auto& e : v)
      if (e.first == name) ++e.second;
  };
  for (std::size_t id = step.first; id <= step.last; ++id) {
    const Concept& c = proof.concept_of(proof.at(id));
    bump(concept_counts, c.feature);
    bump(theory_counts, c.theory);
  }
  std::sort(concept_counts.begin(), concept_counts.end());
  std::sort(theory_counts.begin(), theory_counts.end());
  entries.insert(entries.end(), concept_counts.begin(), concept_counts.end());
  entries.insert(entries.end(), theory_counts.begin(), theory_counts.end());
  return FeatureVector(std::move(entries));
}

}  // namespace proofgrain
