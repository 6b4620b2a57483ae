#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ontograde/correlation.hpp"
#include "ontograde/corpus.hpp"
#include "ontograde/error.hpp"
#include "ontograde/maxent.hpp"
#include "ontograde/ontology.hpp"
#include "ontograde/preprocess.hpp"
#include "ontograde/surface_metrics.hpp"
#include "ontograde/vectorspace.hpp"

namespace ontograde {

enum class Technique { BLEU, MAXENT, LSA, NGRAM1, NGRAM2, NGRAM3, OWW, OBLEU, OMAX, OLSA, ONG1, ONG2, ONG3 };

inline constexpr std::array<Technique, 13> kAllTechniques = {
    Technique::BLEU, Technique::MAXENT, Technique::LSA,  Technique::NGRAM1, Technique::NGRAM2,
    Technique::NGRAM3, Technique::OWW,  Technique::OBLEU, Technique::OMAX,  Technique::OLSA,
    Technique::ONG1, Technique::ONG2,   Technique::ONG3};

/// The eleven columns of the published comparison table.
inline constexpr std::array<Technique, 11> kTableTechniques = {
    Technique::BLEU, Technique::MAXENT, Technique::LSA,  Technique::NGRAM1, Technique::NGRAM2, Technique::OWW,
    Technique::OBLEU, Technique::OMAX,  Technique::OLSA, Technique::ONG1,   Technique::ONG2};

inline const char* to_string(Technique t) {
  switch (t) {
    case Technique::BLEU: return "BLEU";
    case Technique::MAXENT: return "MAXENT";
    case Technique::LSA: return "LSA";
    case Technique::NGRAM1: return "NGRAM1";
    case Technique::NGRAM2: return "NGRAM2";
    case Technique::NGRAM3: return "NGRAM3";
    case Technique::OWW: return "OWW";
    case Technique::OBLEU: return "OBLEU";
    case Technique::OMAX: return "OMAX";
    case Technique::OLSA: return "OLSA";
    case Technique::ONG1: return "ONG1";
    case Technique::ONG2: return "ONG2";
    case Technique::ONG3: return "ONG3";
  }
  return "?";
}

inline std::optional<Technique> parse_technique(std::string_view s) {
  for (auto t : kAllTechniques)
    if (s == to_string(t)) return t;
  return std::nullopt;
}

/// Comma-separated identifiers, or "all" / "table". Result is in canonical order.
inline std::vector<Technique> parse_technique_list(std::string_view list) {
  std::set<Technique> chosen;
  while (!list.empty()) {
    auto comma = list.find(',');
    auto item = detail::trim(list.substr(0, comma));
    if (item == "all") {
      chosen.insert(kAllTechniques.begin(), kAllTechniques.end());
    } else if (item == "table") {
      chosen.insert(kTableTechniques.begin(), kTableTechniques.end());
    } else if (!item.empty()) {
      auto t = parse_technique(item);
      if (!t) throw UsageError("unknown technique '" + std::string(item) + "'");
      chosen.insert(*t);
    }
    if (comma == std::string_view::npos) break;
    list = list.substr(comma + 1);
  }
  if (chosen.empty()) throw UsageError("no techniques selected");
  return {chosen.begin(), chosen.end()};
}

inline bool uses_ontology(Technique t) {
  switch (t) {
    case Technique::OWW:
    case Technique::OBLEU:
    case Technique::OMAX:
    case Technique::OLSA:
    case Technique::ONG1:
    case Technique::ONG2:
    case Technique::ONG3:
      return true;
    default:
      return false;
  }
}

/// Phrase length behind a vector-space technique, 0 for the others.
inline std::size_t phrase_length(Technique t) {
  switch (t) {
    case Technique::LSA:
    case Technique::OLSA: return 1;
    case Technique::NGRAM1:
    case Technique::ONG1: return 2;
    case Technique::NGRAM2:
    case Technique::ONG2: return 3;
    case Technique::NGRAM3:
    case Technique::ONG3: return 4;
    default: return 0;
  }
}

/// Cosines below this count as no match when deciding whether a concept is covered.
inline constexpr double kMatchEpsilon = 1e-9;

/// A concept is present in the latent space when the rank-k reconstruction
/// predicts at least one occurrence of its terms in the answer.
inline constexpr double kLatentMatchMass = 1.0;

struct GradeConfig {
  Lexicon lexicon = Lexicon::english();
  RankPolicy rank;
  DistanceWeighting weighting = DistanceWeighting::Inverse;
  TrainOptions maxent;
  /// Pre-trained MaxEnt models by question id; questions not listed are trained.
  std::map<std::string, PerceptronModel> maxent_models;
};

struct AnswerRow {
  std::string question_id;
  std::string student_id;
  Technique technique;
  double machine = 0.0;
  std::optional<double> human;  ///< normalized to [0, 1]

  friend bool operator==(const AnswerRow&, const AnswerRow&) = default;
};

struct CorrelationRow {
  std::string question_id;
  Technique technique;
  std::optional<double> pearson;  ///< nullopt is reported as "undefined"

  friend bool operator==(const CorrelationRow&, const CorrelationRow&) = default;
};

struct ScoreReport {
  std::vector<AnswerRow> per_answer;
  std::vector<CorrelationRow> per_question;

  friend bool operator==(const ScoreReport&, const ScoreReport&) = default;
};

/// Everything derived once per question and shared by all answers.
class QuestionGrader {
 public:
  QuestionGrader(const Corpus& corpus, const std::vector<Technique>& techniques, const OntologyStore* ontology,
                 const GradeConfig& config)
      : corpus_(corpus), config_(config) {
    if (corpus.model_answers.empty()) throw ConfigError("question '" + corpus.question_id + "' has no model answer");
    if (corpus.student_answers.empty())
      throw ConfigError("question '" + corpus.question_id + "' has no student answers");
    const auto& lex = config.lexicon;
    model_ = preprocess_pipeline(corpus.model_answers.front(), lex);
    model_freq_ = FrequencyTable(model_);
    for (const auto& a : corpus.student_answers) {
      answers_.push_back(preprocess_pipeline(a.text, lex));
      answer_freq_.emplace_back(answers_.back());
      raw_answers_.push_back(tokenize(a.text));
    }

    bool need_ontology = false;
    bool need_maxent = false;
    for (auto t : techniques) {
      need_ontology = need_ontology || uses_ontology(t);
      need_maxent = need_maxent || t == Technique::MAXENT || t == Technique::OMAX;
      if (auto n = phrase_length(t)) space(n);
    }
    if (need_maxent) {
      auto pre = config.maxent_models.find(corpus.question_id);
      if (pre != config.maxent_models.end()) {
        maxent_ = std::make_unique<MaxEntScorer>(corpus.model_answers, pre->second);
      } else {
        std::vector<MaxEntScorer::Calibration> calib;
        for (const auto& a : corpus.student_answers)
          if (a.calibration && a.score) calib.push_back({a.text, *a.score / corpus.max_marks});
        maxent_ = std::make_unique<MaxEntScorer>(corpus.model_answers, calib, config.maxent);
      }
    }
    if (need_ontology) build_concepts(ontology);
  }

  const Corpus& corpus() const { return corpus_; }
  const std::vector<Token>& model_tokens() const { return model_; }
  const std::vector<std::vector<Token>>& answer_tokens() const { return answers_; }
  const ConceptWordMap& concept_map() const { return concept_map_; }
  const ConceptDistanceTable& distances() const { return distances_; }
  const MaxEntScorer* maxent() const { return maxent_.get(); }
  const std::map<std::size_t, LatentSpace>& spaces() const { return spaces_; }

  SimilarityScore score(Technique t, std::size_t answer) const {
    switch (t) {
      case Technique::BLEU:
        return bleu_score(model_freq_, answer_freq_[answer]);
      case Technique::MAXENT:
        return maxent_->score(corpus_.student_answers[answer].text);
      case Technique::LSA:
      case Technique::NGRAM1:
      case Technique::NGRAM2:
      case Technique::NGRAM3:
        return spaces_.at(phrase_length(t)).score(model_, answer).score;
      case Technique::OWW:
        return word_weight_score(ontology_words_, answer_freq_[answer]);
      case Technique::OBLEU:
        return augmented([&](const std::string& c) {
          return bleu_score(concept_freq_.at(c), answer_freq_[answer]).value();
        });
      case Technique::OMAX:
        return augmented([&](const std::string& c) {
          double v = maxent_->evidence(concept_surfaces_.at(c), raw_answers_[answer]);
          return v > kMatchEpsilon ? v : 0.0;
        });
      case Technique::OLSA:
      case Technique::ONG1:
      case Technique::ONG2:
      case Technique::ONG3: {
        const std::size_t n = phrase_length(t);
        const auto& sp = spaces_.at(n);
        return augmented([&](const std::string& c) {
          double v = sp.latent_mass(concept_terms_.at(n).at(c), answer) - kLatentMatchMass;
          return v > 0.0 ? v : 0.0;
        });
      }
    }
    return SimilarityScore();
  }

 private:
  const LatentSpace& space(std::size_t n) {
    auto it = spaces_.find(n);
    if (it == spaces_.end()) it = spaces_.emplace(n, LatentSpace(model_, answers_, n, config_.rank)).first;
    return it->second;
  }

  template <class F>
  SimilarityScore augmented(F&& per_concept) const {
    return ontology_augmented_score(concept_map_, distances_, per_concept, config_.weighting);
  }

  void build_concepts(const OntologyStore* ontology) {
    if (!ontology) throw ConfigError("ontology-augmented techniques need an ontology");
    if (!corpus_.main_concept)
      throw ConfigError("question '" + corpus_.question_id + "' needs concept= for ontology-augmented techniques");
    const auto& lex = config_.lexicon;
    auto raw_map = extract_concepts(*ontology, *corpus_.main_concept, corpus_.question_type, lex);
    distances_ = build_distance_table(*ontology, raw_map.concepts);
    std::vector<std::vector<Token>> sentences;
    for (const auto& s : split_sentences(corpus_.model_answers.front())) sentences.push_back(preprocess_pipeline(s, lex));
    concept_map_ = cluster_model_answer(raw_map, distances_, sentences);
    ontology_words_ = concept_map_.all_words();
    for (const auto& t : model_) ontology_words_.insert(t.stem);

    for (const auto& c : concept_map_.concepts) {
      FrequencyTable f;
      for (const auto& w : concept_map_.words_of(c)) f.add(w);
      concept_freq_.emplace(c, std::move(f));
      const auto& surf = concept_map_.surfaces.at(c);
      concept_surfaces_.emplace(c, std::vector<std::string>(surf.begin(), surf.end()));
    }
    // Per-concept terms for each latent space: concept stems for single
    // words; for phrases, every model-answer phrase containing a concept stem.
    std::map<std::size_t, std::set<std::string>> model_phrases;
    for (const auto& [n, sp] : spaces_) {
      auto stream = term_stream(model_, n);
      model_phrases[n].insert(stream.begin(), stream.end());
    }
    for (const auto& [n, sp] : spaces_) {
      auto& per = concept_terms_[n];
      for (const auto& c : concept_map_.concepts) {
        const auto& words = concept_map_.words_of(c);
        std::vector<std::string> terms;
        if (n == 1) {
          terms.assign(words.begin(), words.end());
        } else {
          for (const auto& phrase : model_phrases.at(n)) {
            bool touches = false;
            std::size_t start = 0;
            while (!touches && start < phrase.size()) {
              auto end = phrase.find(' ', start);
              if (end == std::string::npos) end = phrase.size();
              touches = words.count(phrase.substr(start, end - start)) != 0;
              start = end + 1;
            }
            if (touches) terms.push_back(phrase);
          }
        }
        per.emplace(c, std::move(terms));
      }
    }
  }

  const Corpus& corpus_;
  const GradeConfig& config_;
  std::vector<Token> model_;
  FrequencyTable model_freq_;
  std::vector<std::vector<Token>> answers_;
  std::vector<FrequencyTable> answer_freq_;
  std::vector<std::vector<std::string>> raw_answers_;
  std::map<std::size_t, LatentSpace> spaces_;
  std::unique_ptr<MaxEntScorer> maxent_;
  ConceptWordMap concept_map_;
  ConceptDistanceTable distances_;
  std::set<std::string> ontology_words_;
  std::map<std::string, FrequencyTable> concept_freq_;
  std::map<std::string, std::vector<std::string>> concept_surfaces_;
  std::map<std::size_t, std::map<std::string, std::vector<std::string>>> concept_terms_;
};

/// Pearson r per technique over the answers that carry a human score.
inline std::vector<CorrelationRow> correlate(const Corpus& corpus, const std::vector<AnswerRow>& rows,
                                             const std::vector<Technique>& techniques) {
  std::vector<CorrelationRow> out;
  if (!corpus.has_human_scores()) return out;
  for (auto t : techniques) {
    std::vector<double> machine, human;
    for (const auto& r : rows)
      if (r.question_id == corpus.question_id && r.technique == t && r.human) {
        machine.push_back(r.machine);
        human.push_back(*r.human);
      }
    CorrelationRow row{corpus.question_id, t, std::nullopt};
    if (machine.size() >= 2) row.pearson = pearson(machine, human);
    out.push_back(std::move(row));
  }
  return out;
}

/// Scores every answer of every question with every technique. Rows are
/// ordered by question (file order), student (file order), technique
/// (canonical order). Ontology requirements are checked for all questions
/// before any scoring starts.
inline ScoreReport grade(const std::vector<Corpus>& corpora, std::vector<Technique> techniques,
                         const OntologyStore* ontology, const GradeConfig& config, bool with_correlations = true) {
  std::sort(techniques.begin(), techniques.end());
  techniques.erase(std::unique(techniques.begin(), techniques.end()), techniques.end());
  if (techniques.empty()) throw UsageError("no techniques selected");
  if (std::any_of(techniques.begin(), techniques.end(), uses_ontology)) {
    if (!ontology) throw ConfigError("ontology-augmented techniques need --ontology");
    for (const auto& c : corpora) {
      if (!c.main_concept)
        throw ConfigError("question '" + c.question_id + "' needs concept= for ontology-augmented techniques");
      if (!ontology->has_node(*c.main_concept))
        throw LookupError("question '" + c.question_id + "': unknown concept '" + *c.main_concept + "'");
    }
  }
  ScoreReport report;
  for (const auto& corpus : corpora) {
    QuestionGrader g(corpus, techniques, ontology, config);
    const std::size_t first = report.per_answer.size();
    for (std::size_t i = 0; i < corpus.student_answers.size(); ++i) {
      const auto& a = corpus.student_answers[i];
      std::optional<double> human;
      if (a.score) human = *a.score / corpus.max_marks;
      for (auto t : techniques) report.per_answer.push_back({corpus.question_id, a.id, t, g.score(t, i).value(), human});
    }
    if (with_correlations) {
      std::vector<AnswerRow> rows(report.per_answer.begin() + static_cast<std::ptrdiff_t>(first), report.per_answer.end());
      auto corr = correlate(corpus, rows, techniques);
      report.per_question.insert(report.per_question.end(), corr.begin(), corr.end());
    }
  }
  return report;
}

struct CorrelationSummary {
  Technique technique;
  std::optional<double> max;
  std::optional<double> min;
  std::size_t defined = 0;
  std::size_t undefined = 0;
};

/// Max / min of the defined per-question correlations, per technique.
inline std::vector<CorrelationSummary> summarize(const ScoreReport& report) {
  std::map<Technique, CorrelationSummary> by;
  for (const auto& r : report.per_question) {
    auto& s = by.try_emplace(r.technique, CorrelationSummary{r.technique, {}, {}, 0, 0}).first->second;
    if (!r.pearson) {
      ++s.undefined;
      continue;
    }
    ++s.defined;
    s.max = s.max ? std::max(*s.max, *r.pearson) : *r.pearson;
    s.min = s.min ? std::min(*s.min, *r.pearson) : *r.pearson;
  }
  std::vector<CorrelationSummary> out;
  for (auto& [t, s] : by) out.push_back(s);
  return out;
}

}  // namespace ontograde
