#include <gtest/gtest.h>

#include "proofgrain/annotation.hpp"
#include "support.hpp"

using namespace proofgrain;

TEST(Schedule, ReproducibleAndTruncatedAtBranchEnds) {
  const auto p = pgtest::running();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = annotation_schedule(p, seed);
    const auto again = annotation_schedule(p, seed);
    ASSERT_EQ(s.size(), again.size());
    std::size_t next = 1;
    for (std::size_t i = 0; i < s.size(); ++i) {
      EXPECT_EQ(s[i].first, again[i].first);
      EXPECT_EQ(s[i].last, again[i].last);
      EXPECT_GE(s[i].drawn, 1);
      EXPECT_LE(s[i].drawn, 3);
      EXPECT_EQ(s[i].first, next);
      const std::size_t len = s[i].last - s[i].first + 1;
      EXPECT_LE(len, static_cast<std::size_t>(s[i].drawn));
      // Shorter than drawn only when the branch ends.
      if (len < static_cast<std::size_t>(s[i].drawn)) {
        EXPECT_TRUE(ends_segment(p, s[i].last));
      }
      for (std::size_t id = s[i].first; id < s[i].last; ++id) EXPECT_FALSE(ends_segment(p, id));
      next = s[i].last + 1;
    }
    EXPECT_EQ(next, p.size() + 1);
  }
}

TEST(Schedule, SizesCoverAllThreeValues) {
  std::mt19937_64 rng(12);
  const auto p = pgtest::random_proof(rng, {18, 18, true});
  std::set<int> seen;
  for (std::uint64_t seed = 0; seed < 20; ++seed)
    for (const auto& c : annotation_schedule(p, seed)) seen.insert(c.drawn);
  EXPECT_EQ(seen, (std::set<int>{1, 2, 3}));
}

TEST(Session, TooBigAdvancesPastTheWholeCompound) {
  const auto p = pgtest::running();
  // Find a seed whose first compound has three inferences.
  std::uint64_t seed = 0;
  while (annotation_schedule(p, seed).at(1).last - annotation_schedule(p, seed).at(1).first != 2) ++seed;
  AnnotationSession s(p, seed, StudentModel(p.concepts));
  s.annotate_step(Verdict::Appropriate);
  const std::size_t before = s.consumed();
  const auto pending = s.pending();
  EXPECT_EQ(pending.last - pending.first + 1, 3u);
  s.annotate_step(Verdict::TooBig);
  EXPECT_EQ(s.consumed(), before + 3);
  EXPECT_EQ(s.instances().back().verdict, Verdict::TooBig);
  EXPECT_EQ(s.instances().back().provenance, Provenance::ExpertAnnotation);
}

TEST(Session, CompletionSignalAndPartition) {
  const auto p = pgtest::second();
  AnnotationSession s(p, 4, StudentModel(p.concepts));
  const std::size_t n = s.schedule().size();
  for (std::size_t i = 0; i < n; ++i) {
    EXPECT_FALSE(s.done());
    const bool more = s.annotate_step(kVerdicts[i % 3]);
    EXPECT_EQ(more, i + 1 < n);
  }
  EXPECT_TRUE(s.done());
  EXPECT_EQ(s.consumed(), p.size());
  EXPECT_EQ(s.instances().size(), n);
  EXPECT_THROW(s.annotate_step(Verdict::Appropriate), Error);
  std::size_t covered = 0;
  for (const auto& i : s.instances()) covered += static_cast<std::size_t>(i.fv.at("total"));
  EXPECT_EQ(covered, p.size());
}

TEST(Session, ModelUpdatesOnlyOnAppropriate) {
  const auto p = pgtest::running();
  AnnotationSession s(p, 2, StudentModel(p.concepts));
  while (!s.done()) {
    const auto before = s.model();
    const auto step = s.pending();
    const Verdict v = step.first % 2 ? Verdict::TooSmall : Verdict::Appropriate;
    s.annotate_step(v);
    if (v == Verdict::Appropriate)
      EXPECT_EQ(s.model(), observe(before, p, step, true));
    else
      EXPECT_EQ(s.model(), before);
  }
}

TEST(Session, FeaturesMatchTheExtractor) {
  const auto p = pgtest::running();
  AnnotationSession s(p, 9, StudentModel(p.concepts), false);
  while (!s.done()) {
    const auto fv = extract(s.pending(), p, s.model(), false);
    EXPECT_EQ(s.pending_features(), fv);
    s.annotate_step(Verdict::Appropriate);
    EXPECT_EQ(s.instances().back().fv, fv);
    EXPECT_EQ(fv.at("verb"), 0);
  }
}

TEST(Session, CorpusFeedsTheLearner) {
  std::vector<TrainingInstance> corpus;
  std::mt19937_64 rng(21);
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto p = pgtest::random_proof(rng, {6, 14, false});
    AnnotationSession s(p, seed, StudentModel(p.concepts));
    // Annotator judges by size alone.
    while (!s.done()) {
      const auto total = s.pending_features().at("total");
      s.annotate_step(total == 1 ? Verdict::TooSmall : total == 2 ? Verdict::Appropriate : Verdict::TooBig);
    }
    corpus.insert(corpus.end(), s.instances().begin(), s.instances().end());
  }
  // Proofs with different concept sets give different schemas; keep the core columns.
  for (auto& i : corpus) {
    std::vector<FeatureVector::Entry> e;
    for (std::size_t k = 0; k < 10; ++k) e.push_back(i.fv.entries()[k]);
    i.fv = FeatureVector(e);
  }
  const auto back = read_corpus(write_corpus(corpus));
  const auto rs = learn(back, CostMatrix::uniform());
  EXPECT_EQ(evaluate(back, rs).accuracy, 1.0);
}
