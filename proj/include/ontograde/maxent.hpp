#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ontograde/error.hpp"
#include "ontograde/preprocess.hpp"
#include "ontograde/vectorspace.hpp"

namespace ontograde {

inline constexpr const char* kSentenceStart = "<s>";
inline constexpr const char* kSentenceEnd = "</s>";

/// Word-context counts over raw (lowercased, unstemmed) training answers.
/// Every position contributes the trigram (prev, word, next) with sentinels
/// padding both ends.
class ContextStats {
 public:
  using Trigram = std::tuple<std::string, std::string, std::string>;
  using Context = std::pair<std::string, std::string>;

  void add_answer(const std::vector<std::string>& words) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      const std::string& prev = i == 0 ? std::string(kSentenceStart) : words[i - 1];
      const std::string& next = i + 1 == words.size() ? std::string(kSentenceEnd) : words[i + 1];
      ++trigrams_[Trigram{prev, words[i], next}];
      ++contexts_[words[i]][Context{prev, next}];
      ++unigrams_[words[i]];
    }
  }

  const std::map<Trigram, std::int64_t>& trigram_counts() const { return trigrams_; }
  const std::map<std::string, std::int64_t>& unigram_counts() const { return unigrams_; }
  std::size_t vocabulary_size() const { return unigrams_.size(); }
  bool in_vocabulary(const std::string& w) const { return unigrams_.count(w) != 0; }

  std::int64_t trigram_count(const std::string& prev, const std::string& word, const std::string& next) const {
    auto it = trigrams_.find(Trigram{prev, word, next});
    return it == trigrams_.end() ? 0 : it->second;
  }

  const std::map<Context, std::int64_t>* contexts_of(const std::string& w) const {
    auto it = contexts_.find(w);
    return it == contexts_.end() ? nullptr : &it->second;
  }

  /// log2 of the vocabulary size.
  double unseen_entropy() const {
    return vocabulary_size() > 1 ? std::log2(static_cast<double>(vocabulary_size())) : 0.0;
  }

 private:
  std::map<Trigram, std::int64_t> trigrams_;
  std::map<std::string, std::map<Context, std::int64_t>> contexts_;
  std::map<std::string, std::int64_t> unigrams_;
};

/// Training text is only tokenized and lowercased (no stopwords, synonyms or stems).
inline ContextStats build_context_stats(const std::vector<std::string>& training_answers) {
  if (training_answers.empty()) throw ConfigError("maxent needs at least one training answer");
  ContextStats stats;
  for (const auto& a : training_answers) stats.add_answer(tokenize(a));
  return stats;
}

/// Shannon entropy (bits) of a count distribution.
inline double entropy_bits(const std::vector<std::int64_t>& counts) {
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (auto c : counts) {
    if (c <= 0) continue;
    double p = static_cast<double>(c) / total;
    h -= p * std::log2(p);
  }
  return h;
}

/// Entropy of the (prev, next) context distribution of `word`; unseen words
/// get the unseen-word ceiling.
inline double word_context_entropy(const ContextStats& stats, const std::string& word) {
  const auto* ctx = stats.contexts_of(word);
  if (!ctx) return stats.unseen_entropy();
  std::vector<std::int64_t> counts;
  counts.reserve(ctx->size());
  for (const auto& [c, n] : *ctx) counts.push_back(n);
  return entropy_bits(counts);
}

inline constexpr std::size_t kMaxEntFeatures = 5;
inline constexpr const char* kMaxEntFeatureTag =
    "present_entropy,missing_entropy,word_presence,bigram_presence,length_ratio";

/// Fixed order: mean entropy of model words found in the student answer, mean
/// entropy of missing model words, fraction of model words present, fraction
/// of model bigrams present, min(|student| / |model|, 1).
struct EntropyFeatureVector {
  std::array<double, kMaxEntFeatures> features{};

  double operator[](std::size_t i) const { return features[i]; }
};

inline EntropyFeatureVector extract_features(const ContextStats& stats, const std::vector<std::string>& model,
                                             const std::vector<std::string>& student) {
  EntropyFeatureVector v;
  if (model.empty()) return v;
  std::set<std::string> student_words(student.begin(), student.end());
  std::set<std::pair<std::string, std::string>> student_bigrams;
  for (std::size_t i = 0; i + 1 < student.size(); ++i) student_bigrams.emplace(student[i], student[i + 1]);

  std::set<std::string> seen;
  double present_h = 0.0, missing_h = 0.0;
  std::size_t present = 0, missing = 0;
  for (const auto& w : model) {
    if (!seen.insert(w).second) continue;
    double h = word_context_entropy(stats, w);
    if (student_words.count(w)) {
      present_h += h;
      ++present;
    } else {
      missing_h += h;
      ++missing;
    }
  }
  std::set<std::pair<std::string, std::string>> model_bigrams;
  for (std::size_t i = 0; i + 1 < model.size(); ++i) model_bigrams.emplace(model[i], model[i + 1]);
  std::size_t bigram_hits = 0;
  for (const auto& b : model_bigrams) bigram_hits += student_bigrams.count(b);

  const double unique = static_cast<double>(present + missing);
  v.features[0] = present ? present_h / static_cast<double>(present) : 0.0;
  v.features[1] = missing ? missing_h / static_cast<double>(missing) : 0.0;
  v.features[2] = static_cast<double>(present) / unique;
  // A one-word model has no bigrams; word presence stands in for it.
  v.features[3] = model_bigrams.empty() ? v.features[2]
                                        : static_cast<double>(bigram_hits) / static_cast<double>(model_bigrams.size());
  v.features[4] = std::min(static_cast<double>(student.size()) / static_cast<double>(model.size()), 1.0);
  return v;
}

inline EntropyFeatureVector extract_features(const ContextStats& stats, const std::string& model_answer,
                                             const std::string& student_answer) {
  return extract_features(stats, tokenize(model_answer), tokenize(student_answer));
}

struct PerceptronModel {
  std::array<double, kMaxEntFeatures> weights{};
  double bias = 0.0;
  int epochs_trained = 0;
  /// Set when all training targets were identical; the model is the constant target.
  bool degenerate = false;

  double raw(const EntropyFeatureVector& x) const {
    double s = bias;
    for (std::size_t i = 0; i < kMaxEntFeatures; ++i) s += weights[i] * x[i];
    return s;
  }
};

struct TrainingExample {
  EntropyFeatureVector features;
  double target = 0.0;  ///< normalized to [0, 1]
};

struct TrainOptions {
  int epochs = 500;
  double learning_rate = 0.01;
  std::uint64_t seed = 17;
};

/// Delta-rule (LMS) training of a linear unit: w += lr * (t - y) * x, over
/// epochs in a seeded shuffled order. `epoch_loss`, if given, receives the
/// mean squared error over the whole set after each epoch.
inline PerceptronModel train_perceptron(const std::vector<TrainingExample>& examples, const TrainOptions& opt = {},
                                        std::vector<double>* epoch_loss = nullptr) {
  if (examples.empty()) throw ConfigError("perceptron training needs at least one example");
  if (opt.epochs < 0 || !(opt.learning_rate > 0.0)) throw ConfigError("epochs must be >= 0 and learning rate > 0");
  PerceptronModel model;
  bool distinct = false;
  for (const auto& e : examples) distinct = distinct || e.target != examples.front().target;
  if (!distinct) {
    model.bias = examples.front().target;
    model.degenerate = true;
    return model;
  }

  std::vector<std::size_t> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(opt.seed);
  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    // Fisher-Yates with raw engine output, so the order does not depend on
    // the standard library's distribution implementation.
    for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng() % (i + 1)]);
    for (std::size_t idx : order) {
      const auto& e = examples[idx];
      double err = e.target - model.raw(e.features);
      for (std::size_t f = 0; f < kMaxEntFeatures; ++f) model.weights[f] += opt.learning_rate * err * e.features[f];
      model.bias += opt.learning_rate * err;
    }
    ++model.epochs_trained;
    if (epoch_loss) {
      double loss = 0.0;
      for (const auto& e : examples) {
        double d = e.target - model.raw(e.features);
        loss += d * d;
      }
      epoch_loss->push_back(loss / static_cast<double>(examples.size()));
    }
  }
  return model;
}

inline SimilarityScore maxent_score(const PerceptronModel& model, const EntropyFeatureVector& features) {
  return SimilarityScore(model.raw(features));
}

inline nlohmann::json to_json(const PerceptronModel& m) {
  return nlohmann::json{{"features", kMaxEntFeatureTag},
                        {"weights", m.weights},
                        {"bias", m.bias},
                        {"epochs_trained", m.epochs_trained},
                        {"degenerate", m.degenerate}};
}

inline PerceptronModel perceptron_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("features", std::string()) != kMaxEntFeatureTag)
    throw DataError(DataError::Kind::Malformed, 0, "maxent model has an unknown feature order");
  PerceptronModel m;
  const auto& w = j.at("weights");
  if (!w.is_array() || w.size() != kMaxEntFeatures)
    throw DataError(DataError::Kind::Malformed, 0, "maxent model weight count does not match the feature order");
  for (std::size_t i = 0; i < kMaxEntFeatures; ++i) m.weights[i] = w[i].get<double>();
  m.bias = j.at("bias").get<double>();
  m.epochs_trained = j.value("epochs_trained", 0);
  m.degenerate = j.value("degenerate", false);
  return m;
}

/// Question-level MaxEnt grader. Context statistics come from every model
/// answer; the first model answer is the reference for feature extraction.
/// The training set pairs each model answer with target 1, seeded ablations
/// of each model answer (a random subset of fraction f of its tokens kept, in
/// order) with target f, and any calibration answers with their normalized
/// human scores.
class MaxEntScorer {
 public:
  struct Calibration {
    std::string text;
    double target = 0.0;
  };

  MaxEntScorer(const std::vector<std::string>& model_answers, const std::vector<Calibration>& calibration,
               const TrainOptions& opt = {})
      : stats_(build_context_stats(model_answers)), reference_(tokenize(model_answers.front())) {
    std::vector<TrainingExample> examples;
    std::mt19937_64 rng(opt.seed ^ 0x9e3779b97f4a7c15ULL);
    for (const auto& m : model_answers) {
      auto words = tokenize(m);
      examples.push_back({extract_features(stats_, reference_, words), 1.0});
      for (int rep = 0; rep < kAblationRepeats; ++rep) {
        for (int step = 0; step < kAblationSteps; ++step) {
          double f = static_cast<double>(step) / kAblationSteps;
          auto kept = ablate(words, f, rng);
          double target = words.empty() ? 0.0 : static_cast<double>(kept.size()) / static_cast<double>(words.size());
          examples.push_back({extract_features(stats_, reference_, kept), target});
        }
      }
    }
    for (const auto& c : calibration) examples.push_back({extract_features(stats_, reference_, tokenize(c.text)), c.target});
    model_ = train_perceptron(examples, opt);
  }

  MaxEntScorer(const std::vector<std::string>& model_answers, PerceptronModel model)
      : stats_(build_context_stats(model_answers)), reference_(tokenize(model_answers.front())), model_(model) {}

  const ContextStats& stats() const { return stats_; }
  const PerceptronModel& model() const { return model_; }

  SimilarityScore score(const std::string& student_answer) const {
    return maxent_score(model_, extract_features(stats_, reference_, tokenize(student_answer)));
  }

  /// Contribution of the overlap features (present-word entropy, word and
  /// bigram presence) to the raw output, relative to an answer sharing
  /// nothing with `reference`. Positive when the answer covers `reference`.
  double evidence(const std::vector<std::string>& reference, const std::vector<std::string>& student) const {
    auto x = extract_features(stats_, reference, student);
    return model_.weights[0] * x[0] + model_.weights[2] * x[2] + model_.weights[3] * x[3];
  }

  /// Scores against an arbitrary reference word list (used per ontology concept).
  SimilarityScore score(const std::vector<std::string>& reference, const std::vector<std::string>& student) const {
    return maxent_score(model_, extract_features(stats_, reference, student));
  }

 private:
  static constexpr int kAblationSteps = 10;
  static constexpr int kAblationRepeats = 3;

  static std::vector<std::string> ablate(const std::vector<std::string>& words, double fraction, std::mt19937_64& rng) {
    const std::size_t keep = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(words.size())));
    std::vector<std::size_t> idx(words.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng() % i]);
    idx.resize(keep);
    std::sort(idx.begin(), idx.end());
    std::vector<std::string> out;
    out.reserve(keep);
    for (auto i : idx) out.push_back(words[i]);
    return out;
  }

  ContextStats stats_;
  std::vector<std::string> reference_;
  PerceptronModel model_;
};

}  // namespace ontograde
