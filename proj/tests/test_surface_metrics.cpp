#include <gtest/gtest.h>

#include <random>

#include "ontograde/surface_metrics.hpp"
#include "oracles.hpp"

using namespace ontograde;

namespace {

FrequencyTable freq(const std::vector<std::string>& s) { return FrequencyTable(s); }

// Every word list of length 0..max_len over `vocab`.
void enumerate(const std::vector<std::string>& vocab, std::size_t max_len,
               const std::function<void(const std::vector<std::string>&)>& visit) {
  std::vector<std::string> cur;
  std::function<void()> rec = [&] {
    visit(cur);
    if (cur.size() == max_len) return;
    for (const auto& w : vocab) {
      cur.push_back(w);
      rec();
      cur.pop_back();
    }
  };
  rec();
}

}  // namespace

TEST(FrequencyTable, TotalsAndZeroCounts) {
  FrequencyTable t(std::vector<std::string>{"a", "b", "a"});
  EXPECT_EQ(t.total(), 3);
  EXPECT_EQ(t.count("a"), 2);
  t.add("c", 0);
  EXPECT_EQ(t.counts().count("c"), 0u);
  std::int64_t sum = 0;
  for (const auto& [w, n] : t.counts()) sum += n;
  EXPECT_EQ(sum, t.total());
}

TEST(Bleu, Examples) {
  EXPECT_DOUBLE_EQ(bleu_score(freq({"raster", "scan"}), freq({"raster", "scan", "raster", "display"})).value(), 0.5);
  EXPECT_DOUBLE_EQ(bleu_score(freq({"a", "b", "c"}), freq({"c", "b", "a"})).value(), 1.0);
  EXPECT_EQ(bleu_score(freq({"a", "b"}), freq({"x", "y"})).value(), 0.0);
  EXPECT_EQ(bleu_score(freq({"a"}), freq({})).value(), 0.0);
}

TEST(Bleu, ExhaustiveAgainstCountingOracle) {
  const std::vector<std::string> vocab = {"a", "b", "c"};
  std::vector<std::vector<std::string>> lists;
  enumerate(vocab, 6, [&](const auto& l) { lists.push_back(l); });
  ASSERT_EQ(lists.size(), 1093u);
  // Every model of up to four tokens against every answer of up to six.
  for (const auto& model : lists) {
    if (model.size() > 4) continue;
    auto mf = freq(model);
    for (const auto& answer : lists) EXPECT_EQ(bleu_score(mf, freq(answer)).value(), oracle::bleu(model, answer));
  }
}

TEST(Bleu, RepeatedKeywordIsClipped) {
  auto model = freq({"beam", "beam", "gun"});
  for (int k = 1; k <= 10; ++k) {
    std::vector<std::string> answer(static_cast<std::size_t>(k), "beam");
    EXPECT_DOUBLE_EQ(bleu_score(model, freq(answer)).value(), std::min(k, 2) / static_cast<double>(k));
  }
}

TEST(Bleu, UnderClippedKeywordReplacementRaisesScore) {
  std::mt19937_64 rng(12);
  const std::vector<std::string> pool = {"a", "b", "c", "x", "y"};
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::string> model, answer;
    for (std::size_t i = 0, n = 1 + rng() % 6; i < n; ++i) model.push_back(pool[rng() % 3]);
    for (std::size_t i = 0, n = 1 + rng() % 8; i < n; ++i) answer.push_back(pool[rng() % pool.size()]);
    auto mf = freq(model);
    auto af = freq(answer);
    double before = bleu_score(mf, af).value();
    // Appending a keyword never lowers the matched mass.
    auto longer = answer;
    longer.push_back(pool[rng() % 3]);
    auto lf = freq(longer);
    double matched_before = before * static_cast<double>(answer.size());
    EXPECT_GE(bleu_score(mf, lf).value() * static_cast<double>(longer.size()) + 1e-9, matched_before);
    for (std::size_t i = 0; i < answer.size(); ++i) {
      if (mf.count(answer[i])) continue;
      for (const auto& [w, kf] : mf.counts()) {
        if (af.count(w) >= kf) continue;
        auto swapped = answer;
        swapped[i] = w;
        EXPECT_GT(bleu_score(mf, freq(swapped)).value(), before);
      }
    }
  }
}

TEST(Bleu, DiscrepantAnswerScoresZero) {
  auto model = freq({"electron", "beam", "phosphor"});
  for (std::size_t len = 1; len <= 200; len += 17) {
    std::vector<std::string> off(len, "football");
    EXPECT_EQ(bleu_score(model, freq(off)).value(), 0.0);
  }
}

TEST(WordWeight, Examples) {
  EXPECT_DOUBLE_EQ(word_weight_score({"crt", "phosphor"}, freq({"crt", "crt", "glass", "phosphor"})).value(), 0.75);
  EXPECT_DOUBLE_EQ(word_weight_score({"crt", "phosphor"}, freq({"phosphor", "crt"})).value(), 1.0);
  EXPECT_EQ(word_weight_score({"crt"}, freq({"lcd"})).value(), 0.0);
  EXPECT_EQ(word_weight_score({"crt"}, freq({})).value(), 0.0);
  EXPECT_THROW(word_weight_score({}, freq({"crt"})), ConfigError);
}

TEST(SurfaceMetrics, ScoresInUnitInterval) {
  std::mt19937_64 rng(21);
  const std::vector<std::string> pool = {"a", "b", "c", "d", "e", "f"};
  for (int trial = 0; trial < 2000; ++trial) {
    FrequencyTable model, answer;
    std::set<std::string> words;
    for (const auto& w : pool) {
      model.add(w, static_cast<std::int64_t>(rng() % 4));
      answer.add(w, static_cast<std::int64_t>(rng() % 5));
      if (rng() % 2) words.insert(w);
    }
    double b = bleu_score(model, answer).value();
    EXPECT_GE(b, 0.0);
    EXPECT_LE(b, 1.0);
    if (words.empty()) continue;
    double o = word_weight_score(words, answer).value();
    EXPECT_GE(o, 0.0);
    EXPECT_LE(o, 1.0);
  }
}
