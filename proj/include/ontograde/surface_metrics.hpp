#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ontograde/error.hpp"
#include "ontograde/preprocess.hpp"
#include "ontograde/vectorspace.hpp"

namespace ontograde {

/// Stem counts of one document. Zero counts are never stored.
class FrequencyTable {
 public:
  FrequencyTable() = default;

  explicit FrequencyTable(const std::vector<std::string>& stems) {
    for (const auto& s : stems) add(s);
  }

  explicit FrequencyTable(const std::vector<Token>& tokens) {
    for (const auto& t : tokens) add(t.stem);
  }

  void add(const std::string& stem, std::int64_t n = 1) {
    if (n <= 0) return;
    counts_[stem] += n;
    total_ += n;
  }

  std::int64_t count(const std::string& stem) const {
    auto it = counts_.find(stem);
    return it == counts_.end() ? 0 : it->second;
  }

  const std::map<std::string, std::int64_t>& counts() const { return counts_; }
  std::int64_t total() const { return total_; }

 private:
  std::map<std::string, std::int64_t> counts_;
  std::int64_t total_ = 0;
};

/// Unigram clipped precision: sum over model keywords of min(sf, kf) / |answer|.
inline SimilarityScore bleu_score(const FrequencyTable& model, const FrequencyTable& answer) {
  if (answer.total() == 0) return SimilarityScore(0.0);
  std::int64_t matched = 0;
  for (const auto& [word, kf] : model.counts()) matched += std::min(answer.count(word), kf);
  return SimilarityScore(static_cast<double>(matched) / static_cast<double>(answer.total()));
}

/// Fraction of the answer's tokens that belong to `ontology_words`.
inline SimilarityScore word_weight_score(const std::set<std::string>& ontology_words, const FrequencyTable& answer) {
  if (ontology_words.empty()) throw ConfigError("word-weight scoring needs a non-empty ontology word set");
  if (answer.total() == 0) return SimilarityScore(0.0);
  std::int64_t hits = 0;
  for (const auto& [word, n] : answer.counts())
    if (ontology_words.count(word)) hits += n;
  return SimilarityScore(static_cast<double>(hits) / static_cast<double>(answer.total()));
}

}  // namespace ontograde
