#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "proofgrain/error.hpp"
#include "proofgrain/features.hpp"
#include "proofgrain/labeler.hpp"
#include "proofgrain/rules.hpp"
#include "proofgrain/student_model.hpp"

namespace proofgrain {

enum class Provenance { SampleFit, ExpertAnnotation };

struct TrainingInstance {
  FeatureVector fv;
  Verdict verdict = Verdict::Appropriate;
  Provenance provenance = Provenance::SampleFit;
};

inline std::size_t class_index(Verdict v) { return static_cast<std::size_t>(v); }

// cost(true, predicted), zero diagonal.
class CostMatrix {
 public:
  CostMatrix() {
    for (std::size_t t = 0; t < 3; ++t)
      for (std::size_t p = 0; p < 3; ++p) c_[t][p] = t == p ? 0.0 : 1.0;
  }

  static CostMatrix uniform() { return {}; }

  // Predicting a non-appropriate class for a true appropriate instance costs `bias`.
  static CostMatrix appropriate_bias(double bias = 2.0) {
    CostMatrix m;
    m.set(Verdict::Appropriate, Verdict::TooSmall, bias);
    m.set(Verdict::Appropriate, Verdict::TooBig, bias);
    return m;
  }

  double operator()(Verdict truth, Verdict predicted) const { return c_[class_index(truth)][class_index(predicted)]; }

  void set(Verdict truth, Verdict predicted, double cost) {
    if (truth == predicted && cost != 0) throw Error("cost matrix diagonal must be zero");
    if (!std::isfinite(cost) || cost < 0) throw Error("costs must be finite and nonnegative");
    c_[class_index(truth)][class_index(predicted)] = cost;
  }

 private:
  std::array<std::array<double, 3>, 3> c_{};
};

// Three whitespace-separated rows of three numbers, rows = true class, columns
// = predicted class, both in the order appropriate, step-too-small, step-too-big.
inline CostMatrix parse_costs(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string tok;
    while (fields >> tok) {
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end != tok.c_str() + tok.size()) throw ParseError("expected a number, got '" + tok + "'", lineno, 1);
      values.push_back(v);
    }
  }
  if (values.size() != 9) throw ParseError("cost matrix needs 9 entries, found " + std::to_string(values.size()));
  CostMatrix m;
  for (std::size_t t = 0; t < 3; ++t)
    for (std::size_t p = 0; p < 3; ++p) {
      if (t == p) {
        if (values[t * 3 + p] != 0) throw ParseError("cost matrix diagonal must be zero");
        continue;
      }
      m.set(kVerdicts[t], kVerdicts[p], values[t * 3 + p]);
    }
  return m;
}

using Confusion = std::array<std::array<long long, 3>, 3>;  // [true][predicted]

struct FoldReport {
  std::size_t fold = 0;
  std::size_t test_size = 0;
  double accuracy = 0;
};

struct EvalReport {
  Confusion confusion{};
  double accuracy = 0;
  double kappa = 0;
  std::vector<FoldReport> folds;

  long long total() const {
    long long n = 0;
    for (const auto& row : confusion)
      for (auto v : row) n += v;
    return n;
  }
};

// ---------------------------------------------------------------------------
// Training data from a reference presentation

inline std::vector<TrainingInstance> gen_training_from_sample(const AssertionProof& proof,
                                                              const std::vector<std::size_t>& boundaries,
                                                              const std::map<std::size_t, bool>& verb,
                                                              const StudentModel& initial,
                                                              const FeatureRegistry& registry = FeatureRegistry::core()) {
  if (boundaries.empty()) throw Error("empty boundary list");
  for (std::size_t i = 0; i < boundaries.size(); ++i) {
    const std::size_t id = boundaries[i];
    if (id < 1 || id > proof.size()) throw Error("boundary " + std::to_string(id) + " is not an inference id");
    if (i > 0 && id <= boundaries[i - 1]) throw Error("boundaries must be strictly increasing");
  }
  for (std::size_t id = 1; id <= proof.size(); ++id)
    if (ends_segment(proof, id) && !std::binary_search(boundaries.begin(), boundaries.end(), id))
      throw Error("inference " + std::to_string(id) + " ends a branch segment but is not a boundary");
  if (boundaries.back() != proof.size()) throw Error("last boundary must be the last inference");

  std::vector<TrainingInstance> out;
  StudentModel model = initial;
  std::size_t b = 0;
  for (std::size_t next : boundaries) {
    const auto v = verb.find(next);
    const bool explained = v != verb.end() && v->second;
    // compound_range rejects ranges that cross a branch boundary.
    const CompoundStep step = compound_range(proof, b, next);
    out.push_back({extract(step, proof, model, explained, registry), Verdict::Appropriate});
    for (std::size_t m = b + 1; m < next; ++m)
      out.push_back({extract(compound_range(proof, b, m), proof, model, explained, registry), Verdict::TooSmall});
    if (!ends_segment(proof, next))
      out.push_back(
          {extract(compound_range(proof, b, next + 1), proof, model, explained, registry), Verdict::TooBig});
    model = observe(model, proof, step, explained);
    b = next;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Decision-list induction

struct LearnOptions {
  std::size_t min_cover = 2;
};

namespace detail {

using Counts = std::array<std::size_t, 3>;

inline Counts count_classes(const std::vector<TrainingInstance>& data, const std::vector<std::size_t>& idx) {
  Counts c{};
  for (auto i : idx) ++c[class_index(data[i].verdict)];
  return c;
}

inline double entropy(const Counts& c) {
  const double n = static_cast<double>(c[0] + c[1] + c[2]);
  if (n == 0) return 0;
  double h = 0;
  for (auto k : c)
    if (k) {
      const double p = k / n;
      h -= p * std::log2(p);
    }
  return h;
}

inline bool pure(const Counts& c) { return (c[0] > 0) + (c[1] > 0) + (c[2] > 0) <= 1; }

// Ties go to the earlier class.
inline Verdict majority(const Counts& c) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < 3; ++k)
    if (c[k] > c[best]) best = k;
  return kVerdicts[best];
}

inline Verdict cheapest(const Counts& c, const CostMatrix& costs) {
  Verdict best = Verdict::Appropriate;
  double best_cost = 0;
  for (std::size_t p = 0; p < 3; ++p) {
    double total = 0;
    for (std::size_t t = 0; t < 3; ++t) total += static_cast<double>(c[t]) * costs(kVerdicts[t], kVerdicts[p]);
    if (p == 0 || total < best_cost - 1e-12) {
      best = kVerdicts[p];
      best_cost = total;
    }
  }
  return best;
}

struct Candidate {
  Condition cond;
  double gain = 0;
  double side_entropy = 0;
  bool off_default = false;  // majority of the covered side differs from the current default
  Verdict side_majority = Verdict::Appropriate;
  std::size_t feature_rank = 0;
};

// True when a is preferred over b.
inline bool better(const Candidate& a, const Candidate& b) {
  constexpr double eps = 1e-12;
  if (a.gain > b.gain + eps) return true;
  if (b.gain > a.gain + eps) return false;
  if (a.feature_rank != b.feature_rank) return a.feature_rank < b.feature_rank;
  if (a.cond.threshold != b.cond.threshold) return a.cond.threshold < b.cond.threshold;
  if (a.off_default != b.off_default) return a.off_default;
  if (std::fabs(a.side_entropy - b.side_entropy) > eps) return a.side_entropy < b.side_entropy;
  if (a.side_majority != b.side_majority) return a.side_majority < b.side_majority;
  return a.cond.op == Comparator::LessEq && b.cond.op != Comparator::LessEq;
}

}  // namespace detail

inline void check_schema(const std::vector<TrainingInstance>& instances) {
  if (instances.empty()) throw Error("empty instance list");
  const auto names = instances.front().fv.names();
  for (std::size_t i = 1; i < instances.size(); ++i)
    if (instances[i].fv.names() != names)
      throw Error("schema mismatch: instance " + std::to_string(i + 1) + " has a different feature list");
}

// Separate-and-conquer. `seed` is accepted for interface stability; every
// choice is resolved by the fixed tie-break order, so nothing is random.
inline RuleSet learn(const std::vector<TrainingInstance>& data, const CostMatrix& costs = CostMatrix::appropriate_bias(),
                     std::uint64_t seed = 0, LearnOptions options = {}) {
  (void)seed;
  check_schema(data);
  const auto names = data.front().fv.names();
  // Features are tried in lexicographic name order.
  std::vector<std::size_t> order(names.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return names[a] < names[b]; });
  std::vector<std::size_t> rank(names.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;

  auto value = [&](std::size_t i, std::size_t f) { return data[i].fv.entries()[f].second; };

  std::vector<std::size_t> remaining(data.size());
  std::iota(remaining.begin(), remaining.end(), 0);
  std::vector<Rule> rules;

  while (true) {
    const auto counts = detail::count_classes(data, remaining);
    if (remaining.size() < std::max<std::size_t>(options.min_cover, 1) || detail::pure(counts)) break;
    const Verdict fallback = detail::cheapest(counts, costs);

    std::vector<std::size_t> cover = remaining;
    std::vector<Condition> conds;
    while (true) {
      const auto cc = detail::count_classes(data, cover);
      if (detail::pure(cc)) break;
      const double h = detail::entropy(cc);
      const double n = static_cast<double>(cover.size());
      std::optional<detail::Candidate> best;
      for (std::size_t f = 0; f < names.size(); ++f) {
        std::vector<int> vals;
        for (auto i : cover) vals.push_back(value(i, f));
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        for (std::size_t v = 0; v + 1 < vals.size(); ++v) {
          // Midpoint between adjacent integer values, normalized: f <= lo / f > lo.
          const int t = vals[v];
          detail::Counts le{}, gt{};
          for (auto i : cover) ++(value(i, f) <= t ? le : gt)[class_index(data[i].verdict)];
          const double nl = static_cast<double>(le[0] + le[1] + le[2]);
          const double gain = h - (nl / n) * detail::entropy(le) - ((n - nl) / n) * detail::entropy(gt);
          for (int side = 0; side < 2; ++side) {
            const auto& sc = side == 0 ? le : gt;
            detail::Candidate c;
            c.cond = {names[f], side == 0 ? Comparator::LessEq : Comparator::Greater, t};
            c.gain = gain;
            c.side_entropy = detail::entropy(sc);
            c.side_majority = detail::majority(sc);
            c.off_default = c.side_majority != fallback;
            c.feature_rank = rank[f];
            if (!best || detail::better(c, *best)) best = c;
          }
        }
      }
      if (!best || best->gain <= 1e-12) break;
      conds.push_back(best->cond);
      std::vector<std::size_t> kept;
      for (auto i : cover)
        if (best->cond.holds(data[i].fv.entries()[std::find(names.begin(), names.end(), best->cond.feature) -
                                                   names.begin()].second))
          kept.push_back(i);
      cover = std::move(kept);
    }
    if (conds.empty()) break;

    const auto cc = detail::count_classes(data, cover);
    Rule r;
    r.conditions = std::move(conds);
    r.verdict = detail::majority(cc);
    r.stats = RuleStats{static_cast<double>(cover.size()),
                        static_cast<double>(cover.size() - cc[class_index(r.verdict)])};
    rules.push_back(std::move(r));

    std::vector<std::size_t> rest;
    std::set_difference(remaining.begin(), remaining.end(), cover.begin(), cover.end(), std::back_inserter(rest));
    remaining = std::move(rest);
  }

  // Default: cheapest class over whatever is left; over all data if nothing is.
  std::vector<std::size_t> basis = remaining;
  if (basis.empty()) {
    basis.resize(data.size());
    std::iota(basis.begin(), basis.end(), 0);
  }
  const auto dc = detail::count_classes(data, basis);
  Rule def;
  def.verdict = detail::cheapest(dc, costs);
  if (!remaining.empty())
    def.stats = RuleStats{static_cast<double>(remaining.size()),
                          static_cast<double>(remaining.size() - dc[class_index(def.verdict)])};
  rules.push_back(std::move(def));
  return RuleSet(std::move(rules));
}

// ---------------------------------------------------------------------------
// Evaluation

// κ = (N·trace − Σ r_c·k_c) / (N² − Σ r_c·k_c), computed in integers; 0 when p_e = 1.
inline double cohen_kappa(const Confusion& m) {
  long long n = 0, trace = 0;
  std::array<long long, 3> row{}, col{};
  for (std::size_t t = 0; t < 3; ++t)
    for (std::size_t p = 0; p < 3; ++p) {
      if (m[t][p] < 0) throw Error("confusion counts must be nonnegative");
      n += m[t][p];
      row[t] += m[t][p];
      col[p] += m[t][p];
      if (t == p) trace += m[t][p];
    }
  if (n == 0) throw Error("empty confusion matrix");
  long double chance = 0;
  for (std::size_t c = 0; c < 3; ++c) chance += static_cast<long double>(row[c]) * col[c];
  const long double denom = static_cast<long double>(n) * n - chance;
  if (denom == 0) return 0.0;
  return static_cast<double>((static_cast<long double>(n) * trace - chance) / denom);
}

inline double accuracy_of(const Confusion& m) {
  long long n = 0, trace = 0;
  for (std::size_t t = 0; t < 3; ++t)
    for (std::size_t p = 0; p < 3; ++p) {
      n += m[t][p];
      if (t == p) trace += m[t][p];
    }
  return n ? static_cast<double>(trace) / static_cast<double>(n) : 0.0;
}

inline EvalReport evaluate(const std::vector<TrainingInstance>& instances, const RuleSet& rules) {
  if (instances.empty()) throw Error("empty instance list");
  EvalReport r;
  for (const auto& inst : instances)
    ++r.confusion[class_index(inst.verdict)][class_index(classify(rules, inst.fv))];
  r.accuracy = accuracy_of(r.confusion);
  r.kappa = cohen_kappa(r.confusion);
  return r;
}

// Uniform integer in [0, bound) from a 64-bit engine by rejection, so results
// do not depend on the standard library's distribution implementation.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do x = rng();
  while (x >= limit);
  return x % bound;
}

template <class T>
void seeded_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[bounded(rng, i)]);
}

// fold index per instance. Classes are dealt in class order, each shuffled,
// with one counter running across classes so remainders spread evenly.
inline std::vector<std::size_t> stratified_folds(const std::vector<TrainingInstance>& instances, std::size_t k,
                                                 std::uint64_t seed) {
  if (k < 2) throw Error("need at least 2 folds");
  if (k > instances.size())
    throw Error(std::to_string(k) + " folds exceed the " + std::to_string(instances.size()) + " instances");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> fold(instances.size());
  std::size_t counter = 0;
  for (auto v : kVerdicts) {
    std::vector<std::size_t> group;
    for (std::size_t i = 0; i < instances.size(); ++i)
      if (instances[i].verdict == v) group.push_back(i);
    seeded_shuffle(group, rng);
    for (auto i : group) fold[i] = counter++ % k;
  }
  return fold;
}

inline EvalReport crossvalidate(const std::vector<TrainingInstance>& instances, std::size_t k,
                                const CostMatrix& costs = CostMatrix::appropriate_bias(), std::uint64_t seed = 0,
                                LearnOptions options = {}) {
  check_schema(instances);
  const auto fold = stratified_folds(instances, k, seed);
  EvalReport total;
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<TrainingInstance> train, test;
    for (std::size_t i = 0; i < instances.size(); ++i) (fold[i] == f ? test : train).push_back(instances[i]);
    FoldReport fr{f + 1, test.size(), 0.0};
    if (!test.empty()) {
      const RuleSet rules = learn(train, costs, seed, options);
      const EvalReport part = evaluate(test, rules);
      for (std::size_t t = 0; t < 3; ++t)
        for (std::size_t p = 0; p < 3; ++p) total.confusion[t][p] += part.confusion[t][p];
      fr.accuracy = part.accuracy;
    }
    total.folds.push_back(fr);
  }
  total.accuracy = accuracy_of(total.confusion);
  total.kappa = cohen_kappa(total.confusion);
  return total;
}

inline std::string format_report(const EvalReport& r) {
  char buf[128];
  std::string s = "instances: " + std::to_string(r.total()) + "\n";
  std::snprintf(buf, sizeof buf, "accuracy: %.4f\nkappa: %.4f\n", r.accuracy, r.kappa);
  s += buf;
  s += "confusion (rows true, columns predicted):\n";
  s += "                appropriate step-too-small step-too-big\n";
  for (std::size_t t = 0; t < 3; ++t) {
    std::snprintf(buf, sizeof buf, "%-15s %11lld %14lld %12lld\n", std::string(to_string(kVerdicts[t])).c_str(),
                  r.confusion[t][0], r.confusion[t][1], r.confusion[t][2]);
    s += buf;
  }
  for (const auto& f : r.folds) {
    std::snprintf(buf, sizeof buf, "fold %zu: %zu instances, accuracy %.4f\n", f.fold, f.test_size, f.accuracy);
    s += buf;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Corpus CSV: feature header plus a trailing `class` column.

inline std::string write_corpus(const std::vector<TrainingInstance>& instances) {
  if (instances.empty()) return "class\n";
  check_schema(instances);
  std::string out = instances.front().fv.csv_header();
  out += out.empty() ? "class\n" : ",class\n";
  for (const auto& i : instances) {
    const std::string row = i.fv.csv_row();
    out += row + (row.empty() ? "" : ",") + std::string(to_string(i.verdict)) + "\n";
  }
  return out;
}

inline std::vector<TrainingInstance> read_corpus(std::string_view text,
                                                 Provenance provenance = Provenance::ExpertAnnotation) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
      while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
      while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
      cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
  };
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  std::vector<TrainingInstance> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line);
    if (header.empty()) {
      header = std::move(cells);
      if (header.back() != "class") throw ParseError("corpus header must end with a 'class' column", lineno, 1);
      continue;
    }
    if (cells.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " cells, found " + std::to_string(cells.size()),
                       lineno, 1);
    std::vector<FeatureVector::Entry> entries;
    for (std::size_t c = 0; c + 1 < cells.size(); ++c) {
      try {
        std::size_t used = 0;
        const int v = std::stoi(cells[c], &used);
        if (used != cells[c].size()) throw std::invalid_argument(cells[c]);
        entries.emplace_back(header[c], v);
      } catch (const std::exception&) {
        throw ParseError("column '" + header[c] + "': expected an integer, got '" + cells[c] + "'", lineno, 1);
      }
    }
    auto v = verdict_from_string(cells.back());
    if (!v) throw ParseError("unknown class '" + cells.back() + "'", lineno, 1);
    out.push_back({FeatureVector(std::move(entries)), *v, provenance});
  }
  if (header.empty()) throw ParseError("empty corpus");
  return out;
}

}  // namespace proofgrain
