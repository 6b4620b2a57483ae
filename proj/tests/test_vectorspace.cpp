#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "ontograde/vectorspace.hpp"
#include "oracles.hpp"

using namespace ontograde;

namespace {

std::vector<Token> toks(const std::vector<std::string>& stems) {
  std::vector<Token> out;
  for (const auto& s : stems) out.push_back({s, s});
  return out;
}

Matrix from_rows(const std::vector<std::vector<double>>& rows) {
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

Matrix random_matrix(std::mt19937_64& rng) {
  std::size_t r = 1 + rng() % 12, c = 1 + rng() % 12;
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = static_cast<double>(rng() % 4 == 0 ? 0 : rng() % 6);
  return m;
}

double max_orthogonality_error(const Matrix& q, std::size_t cols) {
  double worst = 0.0;
  for (std::size_t a = 0; a < cols; ++a)
    for (std::size_t b = 0; b < cols; ++b) {
      double d = 0.0;
      for (std::size_t i = 0; i < q.rows(); ++i) d += q(i, a) * q(i, b);
      worst = std::max(worst, std::abs(d - (a == b ? 1.0 : 0.0)));
    }
  return worst;
}

// Random corpus over at most eight stems and five answers.
struct SmallCorpus {
  std::vector<Token> model;
  std::vector<std::vector<Token>> answers;
};

SmallCorpus random_corpus(std::mt19937_64& rng) {
  const std::size_t vocab = 1 + rng() % 8;
  auto word = [&] { return "t" + std::to_string(rng() % vocab); };
  SmallCorpus c;
  std::vector<std::string> m;
  for (std::size_t i = 0, n = 1 + rng() % 6; i < n; ++i) m.push_back(word());
  c.model = toks(m);
  for (std::size_t d = 0, n = 1 + rng() % 5; d < n; ++d) {
    std::vector<std::string> a;
    for (std::size_t i = 0, len = rng() % 7; i < len; ++i) a.push_back(word());
    c.answers.push_back(toks(a));
  }
  return c;
}

}  // namespace

TEST(Diction, Examples) {
  EXPECT_EQ(build_diction(toks({"a"}), {toks({"a"}), toks({"b"})}).entries(), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(build_diction(toks({"a", "b"}), {toks({"b", "a"})}, 2).entries(), (std::vector<std::string>{"a b", "b a"}));
  EXPECT_EQ(build_diction({}, {toks({"x"})}).entries(), (std::vector<std::string>{"x"}));
  EXPECT_THROW(build_diction(toks({"a"}), {}), ConfigError);
}

TEST(Diction, IndexInvertsPosition) {
  auto d = build_diction(toks({"c", "a", "c"}), {toks({"b", "a", "d"})});
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(d.find(d.entries()[i]), i);
  EXPECT_FALSE(d.find("zz"));
}

TEST(Tdf, Examples) {
  auto d = build_diction({}, {toks({"a", "b"})});
  auto m = build_tdf(d, std::vector<std::vector<std::string>>{{"a", "a"}, {"b"}});
  EXPECT_EQ(m.counts, (std::vector<std::int64_t>{2, 0, 0, 1}));
  auto z = build_tdf(d, std::vector<std::vector<std::string>>{{}});
  EXPECT_EQ(z.counts, (std::vector<std::int64_t>{0, 0}));
  auto one = build_tdf(build_diction({}, {toks({"a"})}), std::vector<std::vector<std::string>>{{"a"}, {"a"}});
  EXPECT_EQ(one.counts, (std::vector<std::int64_t>{1, 1}));
}

TEST(Tdf, PhraseStreams) {
  auto d = build_diction(toks({"a", "b", "c"}), {toks({"b", "c"})}, 2);
  auto m = build_tdf(d, std::vector<PhraseStream>{ngrams(toks({"b", "c", "b", "c"}), 2)});
  EXPECT_EQ(m.at(*d.find("b c"), 0), 2);
  EXPECT_EQ(m.at(*d.find("a b"), 0), 0);
}

TEST(Svd, Examples) {
  auto f = svd(Matrix::identity(2), 2);
  EXPECT_NEAR(f.S[0], 1.0, 1e-12);
  EXPECT_NEAR(f.S[1], 1.0, 1e-12);
  auto g = svd(from_rows({{3, 0}, {0, 4}}), 2);
  EXPECT_NEAR(g.S[0], 4.0, 1e-12);
  EXPECT_NEAR(g.S[1], 3.0, 1e-12);
  auto h = svd(from_rows({{1, 1}, {1, 1}}), 2);
  EXPECT_NEAR(h.S[0], 2.0, 1e-12);
  EXPECT_NEAR(h.S[1], 0.0, 1e-12);
  EXPECT_EQ(h.rank, 1u);
}

TEST(Svd, ZeroMatrixIsWellFormed) {
  auto f = svd(Matrix(3, 2), 2);
  EXPECT_EQ(f.rank, 0u);
  for (double s : f.S) EXPECT_EQ(s, 0.0);
  EXPECT_LT(max_orthogonality_error(f.U, 2), 1e-8);
  EXPECT_LT(max_orthogonality_error(f.V, 2), 1e-8);
}

TEST(Svd, RandomNonNegativeMatrices) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    Matrix a = random_matrix(rng);
    auto f = svd(a, std::min(a.rows(), a.cols()));
    const std::size_t p = f.S.size();
    for (std::size_t k = 0; k + 1 < p; ++k) EXPECT_GE(f.S[k], f.S[k + 1]);
    for (double s : f.S) EXPECT_GE(s, 0.0);
    EXPECT_LT(max_orthogonality_error(f.U, p), 1e-8);
    EXPECT_LT(max_orthogonality_error(f.V, p), 1e-8);
    Matrix r = reconstruct(f);
    double err = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j) err += (a(i, j) - r(i, j)) * (a(i, j) - r(i, j));
    EXPECT_LE(std::sqrt(err), 1e-6 * a.frobenius_norm() + 1e-12);
  }
}

TEST(Svd, SingularValuesMatchEigenvalues) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix a = random_matrix(rng);
    auto f = svd(a, 1);
    Eigen::MatrixXd e(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j) e(i, j) = a(i, j);
    Eigen::JacobiSVD<Eigen::MatrixXd> ref(e);
    for (std::size_t k = 0; k < f.S.size(); ++k) EXPECT_NEAR(f.S[k], ref.singularValues()(k), 1e-9);
  }
}

TEST(Rank, EnergyRule) {
  std::vector<double> s = {3, 1, 1};  // energies 9, 1, 1 of 11
  EXPECT_EQ(energy_rank(s, 0.8), 1u);
  EXPECT_EQ(energy_rank(s, 0.9), 2u);
  EXPECT_EQ(energy_rank(s, 1.0), 3u);
  EXPECT_EQ(energy_rank(std::vector<double>{0, 0}), 0u);
}

TEST(Lsa, EmptyAnswerScoresZero) {
  LatentSpace sp(toks({"a", "b"}), {toks({"a", "b"}), toks({})}, 1);
  EXPECT_EQ(sp.score(toks({"a", "b"}), 1).score.value(), 0.0);
  EXPECT_GT(sp.score(toks({"a", "b"}), 0).score.value(), 0.99);
}

TEST(Lsa, IdenticalBeatsDisjoint) {
  LatentSpace sp(toks({"a", "b"}), {toks({"a", "b"}), toks({"c", "d"})}, 1);
  EXPECT_GE(sp.score(toks({"a", "b"}), 0).score.value(), sp.score(toks({"a", "b"}), 1).score.value());
}

TEST(Lsa, AbsentKeywordsAreFlagged) {
  LatentSpace sp(toks({}), {toks({"a"}), toks({"b"})}, 1);
  auto s = sp.score(toks({"zz"}), 0);
  EXPECT_TRUE(s.keywords_absent);
  EXPECT_EQ(s.score.value(), 0.0);
}

TEST(Lsa, FixtureMatchesEigenOracle) {
  // Three terms, two documents.
  auto model = toks({"a", "b"});
  std::vector<std::vector<Token>> answers = {toks({"a", "a", "c"}), toks({"b", "c"})};
  LatentSpace sp(model, answers, 1, RankPolicy{2, 0.9});
  std::vector<std::vector<double>> counts(3, std::vector<double>(2, 0.0));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 2; ++j) counts[i][j] = static_cast<double>(sp.tdf().at(i, j));
  for (std::size_t j = 0; j < 2; ++j)
    EXPECT_NEAR(sp.score(model, j).score.value(), oracle::lsa_score(counts, {0, 1}, j), 1e-6);
}

TEST(Lsa, RandomSmallCorporaMatchEigenOracle) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    auto c = random_corpus(rng);
    LatentSpace sp(c.model, c.answers, 1, RankPolicy{64, 0.9});
    const auto& tdf = sp.tdf();
    ASSERT_LE(tdf.diction.size(), 8u);
    std::vector<std::vector<double>> counts(tdf.diction.size(), std::vector<double>(tdf.documents));
    for (std::size_t i = 0; i < tdf.diction.size(); ++i)
      for (std::size_t j = 0; j < tdf.documents; ++j) counts[i][j] = static_cast<double>(tdf.at(i, j));
    std::set<std::size_t> rows;
    for (const auto& t : c.model) rows.insert(*tdf.diction.find(t.stem));
    for (std::size_t j = 0; j < tdf.documents; ++j)
      EXPECT_NEAR(sp.score(c.model, j).score.value(),
                  oracle::lsa_score(counts, std::vector<std::size_t>(rows.begin(), rows.end()), j), 1e-6);
  }
}

TEST(Glsa, NoSharedPhraseScoresZero) {
  LatentSpace sp(toks({"a", "b", "c"}), {toks({"c", "b", "a"}), toks({"a", "b", "c"})}, 2);
  EXPECT_EQ(sp.score(toks({"a", "b", "c"}), 0).score.value(), 0.0);
  EXPECT_GT(sp.score(toks({"a", "b", "c"}), 1).score.value(), 0.99);
}

TEST(Glsa, FixtureMatchesEigenOracle) {
  auto model = toks({"a", "b", "c", "a"});
  std::vector<std::vector<Token>> answers = {toks({"a", "b", "c"}), toks({"b", "c", "a", "b"}), toks({"c", "a"})};
  LatentSpace sp(model, answers, 2, RankPolicy{64, 0.9});
  const auto& tdf = sp.tdf();
  std::vector<std::vector<double>> counts(tdf.diction.size(), std::vector<double>(tdf.documents));
  for (std::size_t i = 0; i < tdf.diction.size(); ++i)
    for (std::size_t j = 0; j < tdf.documents; ++j) counts[i][j] = static_cast<double>(tdf.at(i, j));
  std::set<std::size_t> rows;
  for (const auto& p : ngrams(model, 2).phrases) rows.insert(*tdf.diction.find(p));
  for (std::size_t j = 0; j < tdf.documents; ++j)
    EXPECT_NEAR(sp.score(model, j).score.value(),
                oracle::lsa_score(counts, std::vector<std::size_t>(rows.begin(), rows.end()), j), 1e-6);
}

TEST(Lsa, ScoresStayInUnitInterval) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    auto c = random_corpus(rng);
    for (std::size_t n = 1; n <= 4; ++n) {
      LatentSpace sp(c.model, c.answers, n, RankPolicy{1 + rng() % 4, 0.9});
      for (std::size_t j = 0; j < c.answers.size(); ++j) {
        double v = sp.score(c.model, j).score.value();
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
    }
  }
}

TEST(Lsa, DocumentOrderEquivariance) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    auto c = random_corpus(rng);
    std::vector<std::size_t> perm(c.answers.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::vector<Token>> shuffled;
    for (auto p : perm) shuffled.push_back(c.answers[p]);
    LatentSpace a(c.model, c.answers, 1, RankPolicy{64, 0.9});
    LatentSpace b(c.model, shuffled, 1, RankPolicy{64, 0.9});
    for (std::size_t j = 0; j < perm.size(); ++j)
      EXPECT_NEAR(b.score(c.model, j).score.value(), a.score(c.model, perm[j]).score.value(), 1e-9);
  }
}

TEST(Lsa, RepeatingKeywordDoesNotLowerScore) {
  auto model = toks({"raster", "scan", "beam", "pixel"});
  std::vector<std::vector<Token>> answers = {toks({"raster", "scan", "beam", "pixel"}), toks({"beam", "glass", "face"}),
                                             toks({"pixel", "grid", "buffer"}), toks({"raster", "phosphor"})};
  for (std::size_t target = 0; target < answers.size(); ++target) {
    LatentSpace base(model, answers, 1);
    double before = base.score(model, target).score.value();
    auto padded = answers;
    for (int i = 0; i < 12; ++i) padded[target].push_back({"raster", "raster"});
    LatentSpace more(model, padded, 1);
    EXPECT_GE(more.score(model, target).score.value(), before - 1e-9) << "answer " << target;
  }
}

TEST(Lsa, LatentMassAtFullRankIsTheCount) {
  auto model = toks({"a", "b"});
  std::vector<std::vector<Token>> answers = {toks({"a", "a", "c"}), toks({"b", "c"}), toks({"c"})};
  LatentSpace sp(model, answers, 1, RankPolicy{64, 0.9});
  EXPECT_NEAR(sp.latent_mass({"a"}, 0), 2.0, 1e-9);
  EXPECT_NEAR(sp.latent_mass({"a", "c", "a"}, 0), 3.0, 1e-9);
  EXPECT_NEAR(sp.latent_mass({"a"}, 2), 0.0, 1e-9);
  EXPECT_EQ(sp.latent_mass({"zz"}, 1), 0.0);
}

TEST(SimilarityScore, Clamps) {
  EXPECT_EQ(SimilarityScore(1.4).value(), 1.0);
  EXPECT_EQ(SimilarityScore(-0.2).value(), 0.0);
  EXPECT_EQ(SimilarityScore(std::nan("")).value(), 0.0);
  EXPECT_EQ(SimilarityScore().value(), 0.0);
}
