#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "proofgrain/features.hpp"
#include "proofgrain/learner.hpp"
#include "proofgrain/proof.hpp"
#include "proofgrain/student_model.hpp"

namespace proofgrain {

struct ScheduledCompound {
  std::size_t first = 0;
  std::size_t last = 0;
  int drawn = 1;  // size before truncation at a branch end
};

// Sizes drawn uniformly from {1, 2, 3}, truncated where a branch segment ends.
inline std::vector<ScheduledCompound> annotation_schedule(const AssertionProof& proof, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ScheduledCompound> out;
  std::size_t pos = 1;
  while (pos <= proof.size()) {
    const int size = 1 + static_cast<int>(bounded(rng, 3));
    std::size_t last = pos;
    while (last < pos + size - 1 && !ends_segment(proof, last)) ++last;
    out.push_back({pos, last, size});
    pos = last + 1;
  }
  return out;
}

class AnnotationSession {
 public:
  AnnotationSession(AssertionProof proof, std::uint64_t seed, StudentModel model, bool verb = true)
      : proof_(std::move(proof)), schedule_(annotation_schedule(proof_, seed)), model_(std::move(model)), verb_(verb) {}

  const AssertionProof& proof() const { return proof_; }
  const std::vector<ScheduledCompound>& schedule() const { return schedule_; }
  const std::vector<TrainingInstance>& instances() const { return instances_; }
  const StudentModel& model() const { return model_; }
  bool verb() const { return verb_; }
  bool done() const { return cursor_ >= schedule_.size(); }
  std::size_t position() const { return cursor_; }

  // Id of the last inference consumed so far, 0 at the start.
  std::size_t consumed() const { return cursor_ == 0 ? 0 : schedule_[cursor_ - 1].last; }

  CompoundStep pending() const {
    if (done()) throw Error("annotation session is complete");
    const auto& s = schedule_[cursor_];
    return compound_range(proof_, s.first - 1, s.last);
  }

  FeatureVector pending_features() const { return extract(pending(), proof_, model_, verb_); }

  // Records the verdict for the pending compound and moves past it. Returns
  // false once the schedule is exhausted.
  bool annotate_step(Verdict verdict) {
    const CompoundStep step = pending();
    instances_.push_back({extract(step, proof_, model_, verb_), verdict, Provenance::ExpertAnnotation});
    if (verdict == Verdict::Appropriate) model_ = observe(model_, proof_, step, verb_);
    ++cursor_;
    return !done();
  }

 private:
  AssertionProof proof_;
  std::vector<ScheduledCompound> schedule_;
  StudentModel model_;
  bool verb_;
  std::size_t cursor_ = 0;
  std::vector<TrainingInstance> instances_;
};

}  // namespace proofgrain
