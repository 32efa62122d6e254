#pragma once

#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "proofgrain/error.hpp"
#include "proofgrain/proof.hpp"

namespace proofgrain {

struct MasteryPolicy {
  int threshold = 1;        // exposures needed for mastery, >= 1
  int explained_bonus = 0;  // extra exposures per application in an explained step
};

struct ConceptRecord {
  int exposures = 0;
  bool mastered = false;
  bool seeded = false;  // mastered at load time regardless of exposures

  friend bool operator==(const ConceptRecord&, const ConceptRecord&) = default;
};

// Per-concept mastery of the addressee. Updates return a new model.
class StudentModel {
 public:
  StudentModel() = default;

  explicit StudentModel(const std::vector<Concept>& concepts, MasteryPolicy policy = {}) : policy_(policy) {
    if (policy.threshold < 1) throw Error("mastery threshold must be >= 1");
    if (policy.explained_bonus < 0) throw Error("explained_bonus must be >= 0");
    for (const auto& c : concepts) records_.emplace(c.name, ConceptRecord{});
  }

  const MasteryPolicy& policy() const { return policy_; }
  const std::map<std::string, ConceptRecord>& records() const { return records_; }

  bool covers(std::string_view name) const { return records_.count(std::string(name)) > 0; }

  const ConceptRecord& record(std::string_view name) const {
    auto it = records_.find(std::string(name));
    if (it == records_.end()) throw Error("student model has no record for concept '" + std::string(name) + "'");
    return it->second;
  }

  bool mastered(std::string_view name) const { return record(name).mastered; }

  void seed_mastered(std::string_view name) {
    auto it = records_.find(std::string(name));
    if (it == records_.end()) throw Error("unknown concept '" + std::string(name) + "' in student model");
    it->second.mastered = true;
    it->second.seeded = true;
  }

  // Adds `count` exposures to a concept and recomputes its mastery.
  void expose(std::string_view name, int count) {
    auto it = records_.find(std::string(name));
    if (it == records_.end()) throw Error("student model has no record for concept '" + std::string(name) + "'");
    auto& r = it->second;
    r.exposures += count;
    r.mastered = r.seeded || r.exposures >= policy_.threshold;
  }

  friend bool operator==(const StudentModel& a, const StudentModel& b) {
    return a.records_ == b.records_ && a.policy_.threshold == b.policy_.threshold &&
           a.policy_.explained_bonus == b.policy_.explained_bonus;
  }

 private:
  MasteryPolicy policy_;
  std::map<std::string, ConceptRecord> records_;
};

// The model after a step has been presented to the user. Only call for steps
// labeled appropriate; withheld steps do not teach.
inline StudentModel observe(const StudentModel& model, const AssertionProof& proof, const CompoundStep& step,
                            bool explained = false) {
  StudentModel next = model;
  const int per_application = 1 + (explained ? model.policy().explained_bonus : 0);
  for (std::size_t id = step.first; id <= step.last; ++id) next.expose(proof.at(id).concept_name, per_application);
  return next;
}

// Model document:
//
//   # comment
//   theta: 2
//   mastered: [Defn-=, Defn-∩]
//   explained_bonus: 0
//
// Every key is optional; an empty document gives theta 1 and nothing mastered.
inline StudentModel load_model(std::string_view document, const std::vector<Concept>& concepts) {
  MasteryPolicy policy;
  std::vector<std::string> seeds;
  std::istringstream in{std::string(document)};
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  auto as_int = [&](const std::string& v) {
    try {
      std::size_t used = 0;
      int n = std::stoi(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return n;
    } catch (const std::exception&) {
      throw ParseError("expected an integer, got '" + v + "'", lineno, 1);
    }
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw ParseError("expected 'key: value'", lineno, 1);
    const std::string key = trim(line.substr(0, colon));
    std::string value = trim(line.substr(colon + 1));
    if (key == "theta") {
      policy.threshold = as_int(value);
      if (policy.threshold < 1) throw ParseError("theta must be >= 1", lineno, colon + 2);
    } else if (key == "explained_bonus") {
      policy.explained_bonus = as_int(value);
      if (policy.explained_bonus < 0) throw ParseError("explained_bonus must be >= 0", lineno, colon + 2);
    } else if (key == "mastered") {
      if (!value.empty() && value.front() == '[') {
        if (value.back() != ']') throw ParseError("unterminated list", lineno, colon + 2);
        value = value.substr(1, value.size() - 2);
      }
      std::istringstream items(value);
      std::string item;
      while (std::getline(items, item, ',')) {
        item = trim(item);
        if (!item.empty()) seeds.push_back(item);
      }
    } else {
      throw ParseError("unknown key '" + key + "'", lineno, 1);
    }
  }
  StudentModel model(concepts, policy);
  for (const auto& s : seeds) {
    if (!model.covers(s)) throw Error("unknown concept '" + s + "' in student model");
    model.seed_mastered(s);
  }
  return model;
}

}  // namespace proofgrain
