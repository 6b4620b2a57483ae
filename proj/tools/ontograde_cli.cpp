// ontograde command-line front end.
//
//   ontograde grade    --corpus F --techniques LIST [--ontology F] --out F --format csv|json
//   ontograde evaluate --corpus F --techniques LIST [...]      (adds per-question correlations)
//   ontograde ontology check F
//   ontograde ontology distance F A B
//   ontograde synth --seed N --answers N --out F
//   ontograde preprocess --text S
//
// Every subcommand accepts --config F, a key=value file whose keys are the
// long flag names; flags given on the command line win.
//
// Exit codes: 0 success, 1 usage, 2 data validation, 3 internal.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ontograde/ontograde.hpp"

namespace {

using namespace ontograde;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

struct GradeArgs {
  std::string corpus;
  std::string techniques = "table";
  std::string ontology;
  std::string weighting = "inverse";
  std::size_t lsa_rank = 0;
  double energy = 0.9;
  std::string out = "-";
  std::string format = "csv";
  std::string stopwords;
  std::string synonyms;
  int epochs = 500;
  double learning_rate = 0.01;
  std::uint64_t seed = 17;
  std::string maxent_model;
  std::string dump_maxent;
  std::string dump_factors;
  std::string correlations;
  std::string config;
};

void add_grade_options(CLI::App* cmd, GradeArgs& a) {
  cmd->add_option("--config", a.config, "key=value file mirroring these flags");
  cmd->add_option("--corpus", a.corpus, "corpus file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--techniques", a.techniques, "comma list of techniques, 'table' or 'all'")->capture_default_str();
  cmd->add_option("--ontology", a.ontology, "triple file (needed by OWW and the O* techniques)");
  cmd->add_option("--distance-weighting", a.weighting, "concept weight rule")
      ->check(CLI::IsMember({"inverse", "literal"}))
      ->capture_default_str();
  cmd->add_option("--lsa-rank", a.lsa_rank, "fixed latent rank (default: 90% energy rule)")->check(CLI::PositiveNumber);
  cmd->add_option("--lsa-energy", a.energy, "energy fraction of the rank rule")
      ->check(CLI::Range(1e-9, 1.0))
      ->capture_default_str();
  cmd->add_option("--out", a.out, "output file, '-' for stdout")->capture_default_str();
  cmd->add_option("--format", a.format, "report format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  cmd->add_option("--stopwords", a.stopwords, "stopword file (default: built-in English list)");
  cmd->add_option("--synonyms", a.synonyms, "synonym file");
  cmd->add_option("--epochs", a.epochs, "MaxEnt training epochs")->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--learning-rate", a.learning_rate, "MaxEnt learning rate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--seed", a.seed, "MaxEnt shuffle seed")->capture_default_str();
  cmd->add_option("--maxent-model", a.maxent_model, "load trained MaxEnt models (JSON by question id)");
  cmd->add_option("--dump-maxent", a.dump_maxent, "write the trained MaxEnt models as JSON");
  cmd->add_option("--dump-factors", a.dump_factors, "write SVD factors of every latent space as JSON");
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path == "-") return std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw DataError(DataError::Kind::Io, 0, "cannot write " + path);
  return file;
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(DataError::Kind::Io, 0, "cannot write " + path);
  out << j.dump(2) << '\n';
}

nlohmann::json read_json_file(const std::string& path) {
  auto in = open_or_throw(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(DataError::Kind::Malformed, 0, path + ": " + e.what());
  }
}

int run_grade(const GradeArgs& a, bool evaluate) {
  GradeConfig cfg;
  cfg.lexicon = load_lexicon(a.stopwords, a.synonyms);
  if (a.lsa_rank) cfg.rank.fixed = a.lsa_rank;
  cfg.rank.energy = a.energy;
  cfg.weighting = *parse_distance_weighting(a.weighting);
  cfg.maxent = TrainOptions{a.epochs, a.learning_rate, a.seed};
  if (!a.maxent_model.empty()) {
    auto j = read_json_file(a.maxent_model);
    if (!j.is_object()) throw DataError(DataError::Kind::Malformed, 0, a.maxent_model + ": expected an object");
    for (const auto& [qid, m] : j.items()) cfg.maxent_models.emplace(qid, perceptron_from_json(m));
  }

  const auto techniques = parse_technique_list(a.techniques);
  const auto corpora = load_corpora(a.corpus);
  std::optional<OntologyStore> store;
  if (!a.ontology.empty()) {
    store = load_ontology_file(a.ontology);
    for (const auto& w : store->warnings()) std::cerr << "warning: " << a.ontology << ": " << w << '\n';
  }

  auto report = grade(corpora, techniques, store ? &*store : nullptr, cfg, evaluate);

  if (!a.dump_maxent.empty() || !a.dump_factors.empty()) {
    nlohmann::json models = nlohmann::json::object(), factors = nlohmann::json::object();
    for (const auto& c : corpora) {
      QuestionGrader g(c, techniques, store ? &*store : nullptr, cfg);
      if (g.maxent()) models[c.question_id] = to_json(g.maxent()->model());
      auto& spaces = factors[c.question_id] = nlohmann::json::array();
      for (const auto& [n, sp] : g.spaces()) spaces.push_back(to_json(sp));
    }
    if (!a.dump_maxent.empty()) write_json_file(a.dump_maxent, models);
    if (!a.dump_factors.empty()) write_json_file(a.dump_factors, factors);
  }

  std::ofstream file;
  std::ostream& out = open_out(a.out, file);
  write_report(out, report, a.format == "json" ? ReportFormat::Json : ReportFormat::Csv);
  out.flush();
  if (!out) throw DataError(DataError::Kind::Io, 0, "write failed for " + a.out);

  if (evaluate) {
    if (!a.correlations.empty()) {
      std::ofstream cf;
      std::ostream& co = open_out(a.correlations, cf);
      write_correlations_csv(co, report);
    }
    // Max / min over questions, the shape of a results table.
    std::ostream& summary = a.out == "-" ? std::cerr : std::cout;
    summary << "technique,max,min,undefined\n";
    for (const auto& s : summarize(report)) {
      auto fmt = [](const std::optional<double>& v) { return v ? detail::fixed6(*v) : std::string("undefined"); };
      summary << to_string(s.technique) << ',' << fmt(s.max) << ',' << fmt(s.min) << ',' << s.undefined << '\n';
    }
  }
  return 0;
}

int run_ontology_check(const std::string& path) {
  auto store = load_ontology_file(path);
  std::size_t individuals = 0;
  for (const auto& [c, inds] : store.individuals()) individuals += inds.size();
  std::cout << "triples " << store.triples().size() << '\n'
            << "nodes " << store.nodes().size() << '\n'
            << "classes " << store.classes().size() << '\n'
            << "individuals " << individuals << '\n'
            << "events " << store.events().size() << '\n';
  for (const auto& w : store.warnings()) std::cerr << "warning: " << w << '\n';
  return 0;
}

int run_ontology_distance(const std::string& path, const std::string& a, const std::string& b) {
  auto store = load_ontology_file(path);
  auto d = concept_distance(store, a, b);
  if (d == ConceptDistanceTable::kUnreachable)
    std::cout << "unreachable\n";
  else
    std::cout << d << '\n';
  return 0;
}

int run_synth(std::uint64_t seed, std::size_t answers, std::size_t questions, const std::string& out_path) {
  auto corpora = synthesize_corpora(seed, questions, answers);
  std::ofstream file;
  std::ostream& out = open_out(out_path, file);
  write_corpora(out, corpora);
  out.flush();
  if (!out) throw DataError(DataError::Kind::Io, 0, "write failed for " + out_path);
  return 0;
}

int run_preprocess(const std::string& text, const std::string& stopwords, const std::string& synonyms) {
  auto lex = load_lexicon(stopwords, synonyms);
  for (const auto& t : preprocess_pipeline(text, lex)) std::cout << t.surface << '\t' << t.stem << '\n';
  return 0;
}

/// Command line with every key of the `--config` file appended as a flag,
/// unless that flag was already given.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw CLI::FileError::Missing(path);
  std::set<std::string> given;
  for (const auto& a : args)
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') - 2));
  for (const auto& item : CLI::ConfigINI().from_config(in)) {
    const std::string& key = item.name;
    if (key.empty() || key == "config" || given.count(key)) continue;
    // Every flag takes one value; the INI reader splits comma lists apart.
    std::string value;
    for (const auto& v : item.inputs) value += (value.empty() ? "" : ",") + v;
    args.push_back("--" + key);
    args.push_back(value);
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grade free-text answers with word-average, latent-semantic and ontology-augmented techniques"};
  app.require_subcommand(1);

  GradeArgs grade_args, eval_args;
  auto* grade_cmd = app.add_subcommand("grade", "score every answer with the selected techniques");
  add_grade_options(grade_cmd, grade_args);
  auto* eval_cmd = app.add_subcommand("evaluate", "grade and correlate machine scores with human scores");
  add_grade_options(eval_cmd, eval_args);
  eval_cmd->add_option("--correlations", eval_args.correlations, "per-question Pearson CSV, '-' for stdout");

  auto* onto_cmd = app.add_subcommand("ontology", "inspect a triple file");
  onto_cmd->require_subcommand(1);
  std::string onto_file, node_a, node_b;
  auto* check_cmd = onto_cmd->add_subcommand("check", "validate a triple file and print its size");
  check_cmd->add_option("file", onto_file, "triple file")->required();
  auto* dist_cmd = onto_cmd->add_subcommand("distance", "hop count between two nodes");
  dist_cmd->add_option("file", onto_file, "triple file")->required();
  dist_cmd->add_option("a", node_a, "first node")->required();
  dist_cmd->add_option("b", node_b, "second node")->required();

  std::uint64_t synth_seed = 1;
  std::size_t synth_answers = 60, synth_questions = 10;
  std::string synth_out = "-";
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic corpus with planted overlap fractions");
  std::string synth_config, pre_config;
  synth_cmd->add_option("--config", synth_config, "key=value file mirroring these flags");
  synth_cmd->add_option("--seed", synth_seed, "random seed")->capture_default_str();
  synth_cmd->add_option("--answers", synth_answers, "answers per question")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth_cmd->add_option("--questions", synth_questions, "number of questions")
      ->check(CLI::Range(1, 10))
      ->capture_default_str();
  synth_cmd->add_option("--out", synth_out, "output corpus file, '-' for stdout")->capture_default_str();

  std::string text, stopwords, synonyms;
  auto* pre_cmd = app.add_subcommand("preprocess", "print the surface and stem of every token");
  pre_cmd->add_option("--config", pre_config, "key=value file mirroring these flags");
  pre_cmd->add_option("--text", text, "text to preprocess")->required();
  pre_cmd->add_option("--stopwords", stopwords, "stopword file");
  pre_cmd->add_option("--synonyms", synonyms, "synonym file");

  try {
    auto args = expand_config(argc, argv);
    std::vector<char*> cargs;
    for (auto& a : args) cargs.push_back(a.data());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*grade_cmd) return run_grade(grade_args, false);
    if (*eval_cmd) return run_grade(eval_args, true);
    if (*check_cmd) return run_ontology_check(onto_file);
    if (*dist_cmd) return run_ontology_distance(onto_file, node_a, node_b);
    if (*synth_cmd) return run_synth(synth_seed, synth_answers, synth_questions, synth_out);
    if (*pre_cmd) return run_preprocess(text, stopwords, synonyms);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const LookupError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}
