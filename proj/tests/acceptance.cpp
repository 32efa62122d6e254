// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>

#include "proofgrain/presenter.hpp"
#include "support.hpp"

namespace pg = proofgrain;

namespace {

struct Check {
  std::vector<std::string> failures;
  std::vector<std::string> notes;
  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 5) failures.push_back(what);
    if (!ok && failures.size() == 5) failures.push_back("...");
  }
};

using Body = std::function<void(Check&)>;

bool run(int number, const char* name, double limit_s, const Body& body) {
  Check c;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (limit_s > 0 && secs > limit_s) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "took %.2f s, limit %.0f s", secs, limit_s);
    c.failures.push_back(buf);
  }
  std::printf("%s  %d. %s (%.3f s)\n", c.failures.empty() ? "PASS" : "FAIL", number, name, secs);
  for (const auto& n : c.notes) std::printf("        %s\n", n.c_str());
  for (const auto& f : c.failures) std::printf("        %s\n", f.c_str());
  return c.failures.empty();
}

pg::FeatureVector core(int total, int parapos, int unmastered, int samesub, int hypintro) {
  return pg::FeatureVector({{"total", total},
                            {"parapos", parapos},
                            {"unmasteredconceptsunique", unmastered},
                            {"samesub", samesub},
                            {"hypintro", hypintro}});
}

void rule_fidelity(Check& c) {
  const auto rs = pg::parse_ruleset(pgtest::part_list_text());
  c.expect(rs.rules().size() == 5, "expected 5 rules");
  c.expect(pg::to_string(rs.rules()[0]) == "total <= 2 AND total > 0 AND parapos <= 0: appropriate (85.0/4.0)",
           "first rule text changed");
  const std::string text = pg::serialize(rs);
  c.expect(pg::parse_ruleset(text) == rs && pg::serialize(pg::parse_ruleset(text)) == text, "round trip");
  for (int t = 0; t < 4; ++t)
    for (int pp = 0; pp < 4; ++pp)
      for (int u = 0; u < 4; ++u)
        for (int ss = 0; ss < 4; ++ss)
          for (int h = 0; h < 4; ++h) {
            const auto fv = core(t, pp, u, ss, h);
            const auto got = pg::classify(rs, fv);
            c.expect(got == pgtest::part_oracle(t, pp, u, ss, h) && got == pgtest::naive_classify(rs, fv),
                     "grid mismatch at total=" + std::to_string(t));
          }
}

pg::Presentation hand(const pg::AssertionProof& p) {
  return pg::present(pg::label_proof(p, pgtest::hand_rules(), pg::StudentModel(p.concepts)));
}

void running_example(Check& c) {
  const auto p = pgtest::running();
  c.expect(p.size() == 15, "fixture has " + std::to_string(p.size()) + " inferences");
  const auto pr = hand(p);
  c.expect(pr.steps.size() == 12, "presented " + std::to_string(pr.steps.size()) + " steps");
  bool merged = false;
  for (const auto& s : pr.steps) merged = merged || (s.first == 11 && s.last == 13);
  c.expect(merged, "inferences 11..13 are not one step");
  c.expect(!pr.steps.empty() && pr.steps[0].kind == pg::StepKind::EqualitySplit &&
               pr.steps[0].mentioned_concepts == std::vector<std::string>{"Defn-="},
           "equality step does not name its concept");
  c.expect(pg::render_step(pr.steps[0]).find("definition of equality") != std::string::npos,
           "equality step text lacks the concept");
}

void second_exercise(Check& c) {
  using K = pg::StepKind;
  const auto pr = hand(pgtest::second());
  const std::vector<K> expected = {K::EqualitySplit, K::HypothesisIntro, K::Derive,          K::Derive,
                                   K::BranchClose,   K::HypothesisIntro, K::Derive,          K::Qed};
  std::vector<K> got;
  for (const auto& s : pr.steps) got.push_back(s.kind);
  c.expect(got == expected, "step kinds differ (" + std::to_string(got.size()) + " steps)");
}

void labeler_properties(Check& c) {
  std::mt19937_64 rng(1);
  const auto appropriate = pg::parse_ruleset(": appropriate");
  const auto big = pg::parse_ruleset(": step-too-big");
  for (int t = 0; t < 1000; ++t) {
    const auto p = pgtest::random_proof(rng);
    const auto rs = pgtest::random_rules(rng);
    const std::size_t k = p.size();
    const auto lp = pg::label_proof(p, rs, pg::StudentModel(p.concepts));
    const std::string at = " (proof " + std::to_string(t) + ")";
    c.expect(lp.iterations <= 2 * k, "iterations" + at);
    c.expect(lp.labels.size() == k, "label count" + at);
    c.expect(!lp.boundaries.empty() && lp.boundaries.back() == k, "last boundary" + at);
    std::size_t prev = 0;
    for (auto b : lp.boundaries) {
      c.expect(b > prev, "boundaries not increasing" + at);
      prev = b;
    }
    for (std::size_t id = 1; id <= k; ++id) {
      const bool is_b = std::binary_search(lp.boundaries.begin(), lp.boundaries.end(), id);
      c.expect(is_b == pg::is_appropriate(lp.label(id)), "label/boundary mismatch" + at);
      if (pg::ends_segment(p, id)) c.expect(is_b, "segment end not a boundary" + at);
    }
    const auto pr = pg::present(lp);
    std::size_t next = 1;
    for (const auto& s : pr.steps) {
      c.expect(s.first == next, "presentation gap" + at);
      next = s.last + 1;
    }
    c.expect(next == k + 1, "presentation does not cover the proof" + at);
    std::map<std::size_t, int> touched;
    for (const auto& ev : lp.trace)
      ++touched[ev.action == pg::LabelingEvent::Action::PreviousClosed ? ev.n - 1 : ev.n];
    for (const auto& [id, n] : touched) c.expect(n <= 2, "inference relabeled twice" + at);
    for (const auto* degenerate : {&appropriate, &big})
      c.expect(pg::present(pg::label_proof(p, *degenerate, pg::StudentModel(p.concepts))).steps.size() == k,
               "degenerate rule set" + at);
  }
}

void feature_invariants(Check& c) {
  std::vector<pg::AssertionProof> proofs = {pgtest::running(), pgtest::second()};
  std::mt19937_64 rng(2);
  for (int t = 0; t < 1000; ++t) proofs.push_back(pgtest::random_proof(rng, {1, 10, false}));
  for (const auto& p : proofs) {
    const pg::StudentModel m(p.concepts);
    for (std::size_t b = 0; b < p.size(); ++b)
      for (std::size_t n = b + 1; n <= p.size(); ++n) {
        if (n > b + 1 && pg::starts_segment(p, n)) break;
        for (bool verb : {true, false}) {
          const auto fv = pg::extract(pg::compound_range(p, b, n), p, m, verb);
          const int total = static_cast<int>(n - b);
          c.expect(fv.at("total") == total, "total");
          c.expect(fv.at("masteredconceptsunique") + fv.at("unmasteredconceptsunique") == fv.at("conceptsunique"),
                   "conceptsunique split");
          c.expect(fv.at("conceptsunique") >= 1 && fv.at("conceptsunique") <= total, "conceptsunique range");
          c.expect(fv.at("conceptsunseen") <= fv.at("conceptsunique"), "conceptsunseen range");
          int theory_sum = 0, concept_sum = 0;
          for (const auto& th : p.theories) theory_sum += fv.at(th);
          for (const auto& con : p.concepts) concept_sum += fv.at(con.feature);
          c.expect(theory_sum == total, "theory-count sum");
          c.expect(concept_sum == total, "concept-count sum");
          for (const char* flag : {"hypintro", "close", "parapos", "samesub", "verb"})
            c.expect(fv.at(flag) == 0 || fv.at(flag) == 1, std::string(flag) + " range");
          c.expect(fv.at("verb") == (verb ? 1 : 0), "verb");
        }
      }
  }
}

void learner_closure(Check& c) {
  const auto p = pgtest::running();
  const pg::StudentModel m(p.concepts);
  const auto ref = pg::label_proof(p, pgtest::hand_rules(), m);
  std::map<std::size_t, bool> verb;
  for (auto b : ref.boundaries) verb[b] = ref.label(b) == pg::StepLabel::AppropriateWithExplanation;
  const auto inst = pg::gen_training_from_sample(p, ref.boundaries, verb, m);
  const auto rs = pg::learn(inst);
  c.expect(pg::evaluate(inst, rs).accuracy == 1.0, "training accuracy below 100%");
  c.expect(rs.default_rule().verdict == pg::Verdict::Appropriate, "default class is not appropriate");
  c.expect(pg::label_proof(p, rs, m).boundaries == ref.boundaries, "relabeling changed the boundaries");
  c.expect(ref.boundaries.size() == 12, "reference has " + std::to_string(ref.boundaries.size()) + " steps");
}

void kappa_and_folds(Check& c) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    pg::Confusion m{};
    for (auto& row : m)
      for (auto& v : row) v = static_cast<long long>(rng() % 50);
    m[0][0] += 1;
    c.expect(std::fabs(pg::cohen_kappa(m) - pgtest::kappa_oracle(m)) <= 1e-12, "kappa differs from oracle");
  }
  c.expect(pg::cohen_kappa({{{5, 0, 0}, {0, 7, 0}, {0, 0, 9}}}) == 1.0, "diagonal kappa");
  const long long r[3] = {3, 1, 4}, k[3] = {2, 5, 1};
  pg::Confusion outer{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) outer[i][j] = r[i] * k[j];
  c.expect(std::fabs(pg::cohen_kappa(outer)) < 1e-15, "independence kappa");

  for (int trial = 0; trial < 30; ++trial) {
    const auto data = pgtest::synthetic_corpus(100 + trial, 50 + rng() % 250);
    const auto fold = pg::stratified_folds(data, 10, trial);
    std::array<std::array<std::size_t, 3>, 10> per{};
    std::array<std::size_t, 3> total{};
    for (std::size_t i = 0; i < data.size(); ++i) {
      c.expect(fold[i] < 10, "fold index out of range");
      ++per[fold[i]][pg::class_index(data[i].verdict)];
      ++total[pg::class_index(data[i].verdict)];
    }
    for (std::size_t cl = 0; cl < 3; ++cl)
      for (std::size_t f = 0; f < 10; ++f)
        c.expect(std::fabs(static_cast<double>(per[f][cl]) - static_cast<double>(total[cl]) / 10.0) <= 1.0,
                 "class ratio off by more than one instance");
  }
}

void synthetic_cv(Check& c) {
  double sum = 0;
  const int seeds = 20;
  for (int s = 1; s <= seeds; ++s) {
    const auto data = pgtest::synthetic_corpus(static_cast<std::uint64_t>(s));
    const auto a = pg::crossvalidate(data, 10, pg::CostMatrix::uniform(), static_cast<std::uint64_t>(s));
    const auto b = pg::crossvalidate(data, 10, pg::CostMatrix::uniform(), static_cast<std::uint64_t>(s));
    c.expect(pg::format_report(a) == pg::format_report(b), "not deterministic for seed " + std::to_string(s));
    c.expect(a.kappa > 0.5, "kappa " + std::to_string(a.kappa) + " for seed " + std::to_string(s));
    sum += a.accuracy;
  }
  const double mean = sum / seeds;
  char buf[64];
  std::snprintf(buf, sizeof buf, "mean accuracy %.4f", mean);
  c.expect(mean >= 0.85 && mean <= 0.95, buf);
  std::snprintf(buf, sizeof buf, "mean 10-fold accuracy over %d seeds: %.4f", seeds, mean);
  c.notes.push_back(buf);
}

}  // namespace

int main() {
  bool ok = true;
  ok &= run(1, "rule-set fidelity", 1, rule_fidelity);
  ok &= run(2, "running-example reproduction", 1, running_example);
  ok &= run(3, "second-exercise reproduction", 1, second_exercise);
  ok &= run(4, "labeler properties", 0, labeler_properties);
  ok &= run(5, "feature invariants", 0, feature_invariants);
  ok &= run(6, "learner closure", 5, learner_closure);
  ok &= run(7, "kappa and cross-validation folds", 0, kappa_and_folds);
  ok &= run(8, "synthetic-corpus cross-validation", 30, synthetic_cv);
  return ok ? 0 : 1;
}
