// proofgrain command-line front end.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "proofgrain/annotation.hpp"
#include "proofgrain/labeler.hpp"
#include "proofgrain/learner.hpp"
#include "proofgrain/presenter.hpp"
#include "proofgrain/proof_io.hpp"
#include "proofgrain/rules.hpp"

namespace pg = proofgrain;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

// Error tied to an input file, printed as "path: message".
struct FileError : std::runtime_error {
  FileError(const std::string& path, const std::string& what) : std::runtime_error(path + ": " + what) {}
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError(path, "cannot read file");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

template <class F>
auto with_file(const std::string& path, F&& f) -> decltype(f(std::string())) {
  const std::string text = slurp(path);
  try {
    return f(text);
  } catch (const pg::Error& e) {
    throw FileError(path, e.what());
  }
}

pg::AssertionProof load_proof(const std::string& path) {
  return with_file(path, [](const std::string& t) { return pg::parse_proof(t); });
}

pg::RuleSet load_rules(const std::string& path) {
  return with_file(path, [](const std::string& t) { return pg::parse_ruleset(t); });
}

pg::StudentModel load_student(const std::string& path, const pg::AssertionProof& proof) {
  if (path.empty()) return pg::StudentModel(proof.concepts);
  return with_file(path, [&](const std::string& t) { return pg::load_model(t, proof.concepts); });
}

std::vector<pg::TrainingInstance> load_corpus(const std::string& path) {
  return with_file(path, [](const std::string& t) { return pg::read_corpus(t); });
}

std::vector<std::size_t> parse_id_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item.front() == '-') throw CLI::ValidationError("id list", "bad id '" + item + "'");
    out.push_back(v);
  }
  return out;
}

void print_model(std::ostream& os, const pg::StudentModel& m) {
  os << "student model (theta " << m.policy().threshold << "):\n";
  for (const auto& [name, r] : m.records())
    os << "  " << name << ": " << r.exposures << " exposure(s)" << (r.mastered ? ", mastered" : "") << "\n";
}

std::optional<pg::Verdict> read_verdict(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (c != ' ' && c != '\t' && c != '\r') s += c;
  if (s == "a" || s == "appropriate") return pg::Verdict::Appropriate;
  if (s == "s" || s == "small" || s == "too-small" || s == "step-too-small") return pg::Verdict::TooSmall;
  if (s == "b" || s == "big" || s == "too-big" || s == "step-too-big") return pg::Verdict::TooBig;
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive proof step granularity: label, present and learn"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "proofgrain 0.1.0");

  std::string proof_path, rules_path, model_path, corpus_path, costs_path, out_path, format = "text";
  std::string boundaries, explained;
  std::size_t from = 1, to = 0, folds = 0, min_cover = 2;
  std::uint64_t seed = 0;
  bool verb = false, no_explanations = false, show_model = false;

  auto seed_option = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Random seed")->envname("PROOFGRAIN_SEED");
  };

  auto* parse = app.add_subcommand("parse", "Validate a proof and print a summary");
  parse->add_option("--proof,proof", proof_path, "Proof file")->required();

  auto* features = app.add_subcommand("features", "Print the feature vector of a compound step");
  features->add_option("--proof", proof_path, "Proof file")->required();
  features->add_option("--from", from, "First inference id")->check(CLI::PositiveNumber);
  features->add_option("--to", to, "Last inference id (defaults to --from)");
  features->add_flag("--verb", verb, "Step is presented with explanation");
  features->add_option("--student-model", model_path, "Student model file");

  auto* label = app.add_subcommand("label", "Label every inference of a proof");
  label->add_option("--proof", proof_path, "Proof file")->required();
  label->add_option("--rules", rules_path, "Rule set file")->required();
  label->add_option("--student-model", model_path, "Student model file");

  auto* present = app.add_subcommand("present", "Render the adapted presentation of a proof");
  present->add_option("--proof", proof_path, "Proof file")->required();
  present->add_option("--rules", rules_path, "Rule set file")->required();
  present->add_option("--student-model", model_path, "Student model file");
  present->add_option("--format", format, "text or structured")->check(CLI::IsMember({"text", "structured"}));

  auto* gen = app.add_subcommand("gen-training", "Training corpus from a reference presentation");
  gen->add_option("--proof", proof_path, "Proof file")->required();
  gen->add_option("--boundaries", boundaries, "Comma-separated ids ending each reference step")->required();
  gen->add_option("--explained", explained, "Comma-separated boundaries presented with explanation");
  gen->add_option("--student-model", model_path, "Student model file");

  auto* learn = app.add_subcommand("learn", "Induce a decision list from a corpus");
  learn->add_option("--corpus", corpus_path, "Corpus CSV")->required();
  learn->add_option("--costs", costs_path, "Cost matrix file (3x3, rows true class)");
  learn->add_option("--min-cover", min_cover, "Stop when fewer instances remain")->check(CLI::PositiveNumber);
  seed_option(learn);

  auto* eval = app.add_subcommand("eval", "Evaluate a rule set or cross-validate the learner");
  eval->add_option("--corpus", corpus_path, "Corpus CSV")->required();
  auto* eval_rules = eval->add_option("--rules", rules_path, "Rule set to evaluate");
  auto* eval_folds = eval->add_option("--folds", folds, "Stratified cross-validation folds")->check(CLI::Range(2, 1000000));
  eval_rules->excludes(eval_folds);
  eval->add_option("--costs", costs_path, "Cost matrix file for learning");
  eval->add_option("--min-cover", min_cover, "Learner minimum cover")->check(CLI::PositiveNumber);
  seed_option(eval);

  auto* annotate = app.add_subcommand("annotate", "Interactive granularity annotation session");
  annotate->add_option("--proof", proof_path, "Proof file")->required();
  annotate->add_option("--out", out_path, "Output corpus CSV")->required();
  annotate->add_flag("--no-explanations", no_explanations, "Present steps without concept names");
  annotate->add_flag("--show-model", show_model, "Print the student model before each prompt");
  annotate->add_option("--student-model", model_path, "Student model file");
  seed_option(annotate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*parse) {
      const auto proof = load_proof(proof_path);
      const auto segs = pg::segments(proof);
      std::cout << "theorem: " << pg::to_string(proof.theorem) << "\n"
                << "inferences: " << proof.size() << "\n"
                << "branches: " << segs.size() << "\n"
                << "concepts: " << proof.concepts.size() << "\n"
                << "theories: " << proof.theories.size() << "\n";
      for (const auto& s : segs) std::cout << "  " << s.branch << ": " << s.first << ".." << s.last << "\n";
      return kOk;
    }
    if (*features) {
      const auto proof = load_proof(proof_path);
      const auto model = load_student(model_path, proof);
      if (to == 0) to = from;
      if (from > to || to > proof.size()) {
        std::cerr << "error: range " << from << ".." << to << " is outside 1.." << proof.size() << "\n";
        return kUsage;
      }
      const auto fv = pg::extract(pg::compound_range(proof, from - 1, to), proof, model, verb);
      std::cout << fv.csv_header() << "\n" << fv.csv_row() << "\n";
      return kOk;
    }
    if (*label || *present) {
      const auto proof = load_proof(proof_path);
      const auto rules = load_rules(rules_path);
      const auto model = load_student(model_path, proof);
      const auto labeled = pg::label_proof(proof, rules, model);
      if (*label) {
        std::cout << pg::dump_labels(labeled);
      } else {
        std::cout << pg::render_text(pg::present(labeled), format == "structured" ? pg::PresentationFormat::Structured
                                                                                  : pg::PresentationFormat::Text);
      }
      return kOk;
    }
    if (*gen) {
      const auto proof = load_proof(proof_path);
      const auto model = load_student(model_path, proof);
      const auto ids = parse_id_list(boundaries);
      std::map<std::size_t, bool> verb_of;
      for (auto id : parse_id_list(explained)) verb_of[id] = true;
      std::cout << pg::write_corpus(pg::gen_training_from_sample(proof, ids, verb_of, model));
      return kOk;
    }
    if (*learn || *eval) {
      const auto corpus = load_corpus(corpus_path);
      pg::CostMatrix costs = pg::CostMatrix::appropriate_bias();
      if (!costs_path.empty())
        costs = with_file(costs_path, [](const std::string& t) { return pg::parse_costs(t); });
      pg::LearnOptions options{min_cover};
      if (*learn) {
        std::cout << pg::serialize(pg::learn(corpus, costs, seed, options));
        return kOk;
      }
      if (!rules_path.empty()) {
        std::cout << pg::format_report(pg::evaluate(corpus, load_rules(rules_path)));
      } else if (folds > 0) {
        std::cout << pg::format_report(pg::crossvalidate(corpus, folds, costs, seed, options));
      } else {
        std::cerr << "error: eval needs --rules or --folds\n";
        return kUsage;
      }
      return kOk;
    }
    if (*annotate) {
      const auto proof = load_proof(proof_path);
      pg::AnnotationSession session(proof, seed, load_student(model_path, proof), !no_explanations);
      std::ofstream probe(out_path, std::ios::app);
      if (!probe) throw FileError(out_path, "cannot write file");
      probe.close();
      std::cout << "Theorem: " << pg::to_string(proof.theorem) << "\n"
                << session.schedule().size() << " step(s) to judge. Answer a (appropriate), s (too small) or b (too big).\n";
      bool interrupted = false;
      while (!session.done()) {
        const auto c = session.pending();
        if (show_model) print_model(std::cout, session.model());
        const auto step = pg::describe_range(proof, c.first, c.last, session.verb());
        std::cout << "\n[" << session.position() + 1 << "/" << session.schedule().size() << "] inferences " << c.first
                  << ".." << c.last << "\n  " << pg::render_step(step) << "\nverdict> " << std::flush;
        std::string line;
        std::optional<pg::Verdict> v;
        while (true) {
          if (!std::getline(std::cin, line)) {
            interrupted = true;
            break;
          }
          if ((v = read_verdict(line))) break;
          std::cout << "please answer a, s or b\nverdict> " << std::flush;
        }
        if (interrupted) break;
        session.annotate_step(*v);
      }
      std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
      out << pg::write_corpus(session.instances());
      if (!out) throw FileError(out_path, "write failed");
      std::cout << "\nwrote " << session.instances().size() << " instance(s) to " << out_path << "\n";
      if (interrupted) std::cerr << "warning: input ended before the session was complete\n";
      return kOk;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
