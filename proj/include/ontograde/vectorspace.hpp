#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ontograde/error.hpp"
#include "ontograde/preprocess.hpp"

namespace ontograde {

/// Machine score, always inside [0, 1]. NaN collapses to 0.
class SimilarityScore {
 public:
  constexpr SimilarityScore() = default;
  explicit SimilarityScore(double v) : value_(std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0)) {}

  double value() const { return value_; }

 private:
  double value_ = 0.0;
};

/// Row-major dense matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Unique terms (stems or n-word phrases) in first-occurrence order.
class Diction {
 public:
  Diction() = default;

  /// Appends `term` if new; returns its row.
  std::size_t add(const std::string& term) {
    auto [it, inserted] = index_.try_emplace(term, entries_.size());
    if (inserted) entries_.push_back(term);
    return it->second;
  }

  std::optional<std::size_t> find(const std::string& term) const {
    auto it = index_.find(term);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::vector<std::string>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<std::string> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Terms of a document: stems for n = 1, space-joined n-word phrases otherwise.
inline std::vector<std::string> term_stream(const std::vector<Token>& tokens, std::size_t n) {
  if (n == 1) return stems_of(tokens);
  return ngrams(tokens, n).phrases;
}

/// Diction over the model answer followed by every student answer. `n` is
/// the phrase length (1 selects single words).
inline Diction build_diction(const std::vector<Token>& model, const std::vector<std::vector<Token>>& answers,
                             std::size_t n = 1) {
  if (answers.empty()) throw ConfigError("cannot build a diction without student answers");
  Diction d;
  for (const auto& t : term_stream(model, n)) d.add(t);
  for (const auto& a : answers)
    for (const auto& t : term_stream(a, n)) d.add(t);
  return d;
}

/// Counts of each diction entry (rows) in each document (columns).
struct TermDocumentMatrix {
  Diction diction;
  std::size_t documents = 0;
  std::vector<std::int64_t> counts;  // row-major, diction.size() x documents

  std::int64_t at(std::size_t term, std::size_t doc) const { return counts[term * documents + doc]; }

  Matrix to_matrix() const {
    Matrix m(diction.size(), documents);
    for (std::size_t i = 0; i < diction.size(); ++i)
      for (std::size_t j = 0; j < documents; ++j) m(i, j) = static_cast<double>(at(i, j));
    return m;
  }
};

/// Terms that are not in the diction are ignored.
inline TermDocumentMatrix build_tdf(const Diction& diction, const std::vector<std::vector<std::string>>& documents) {
  if (diction.empty()) throw ConfigError("cannot build a term-document matrix over an empty diction");
  TermDocumentMatrix tdf;
  tdf.diction = diction;
  tdf.documents = documents.size();
  tdf.counts.assign(diction.size() * documents.size(), 0);
  for (std::size_t j = 0; j < documents.size(); ++j)
    for (const auto& term : documents[j])
      if (auto row = diction.find(term)) ++tdf.counts[*row * tdf.documents + j];
  return tdf;
}

inline TermDocumentMatrix build_tdf(const Diction& diction, const std::vector<PhraseStream>& documents) {
  std::vector<std::vector<std::string>> docs;
  docs.reserve(documents.size());
  for (const auto& d : documents) docs.push_back(d.phrases);
  return build_tdf(diction, docs);
}

/// Thin SVD A = U diag(S) V^T with p = min(rows, cols) factors. `rank` is the
/// number of leading factors used for scoring.
struct SvdFactors {
  Matrix U;  // rows x p
  std::vector<double> S;
  Matrix V;  // cols x p
  std::size_t rank = 0;
};

namespace detail {

struct JacobiResult {
  Matrix U;
  std::vector<double> S;
  Matrix V;
};

// One-sided (Hestenes) Jacobi for a tall matrix (rows >= cols).
inline JacobiResult jacobi_svd_tall(const Matrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  Matrix w = a;
  Matrix v = Matrix::identity(n);
  constexpr double kTol = 1e-15;
  constexpr int kMaxSweeps = 80;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          alpha += w(i, p) * w(i, p);
          beta += w(i, q) * w(i, q);
          gamma += w(i, p) * w(i, q);
        }
        if (gamma == 0.0 || std::abs(gamma) <= kTol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        double zeta = (beta - alpha) / (2.0 * gamma);
        double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          double wp = w(i, p), wq = w(i, q);
          w(i, p) = c * wp - s * wq;
          w(i, q) = s * wp + c * wq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          double vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += w(i, j) * w(i, j);
    sigma[j] = std::sqrt(s);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  JacobiResult r{Matrix(m, n), std::vector<double>(n), Matrix(n, n)};
  const double smax = n ? sigma[order[0]] : 0.0;
  const double zero_tol = static_cast<double>(std::max(m, n)) * DBL_EPSILON * smax;
  std::vector<bool> filled(n, false);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t j = order[k];
    r.S[k] = sigma[j];
    for (std::size_t i = 0; i < n; ++i) r.V(i, k) = v(i, j);
    if (sigma[j] > zero_tol && sigma[j] > 0.0) {
      for (std::size_t i = 0; i < m; ++i) r.U(i, k) = w(i, j) / sigma[j];
      filled[k] = true;
    }
  }
  // Null directions: complete U with Gram-Schmidt over the standard basis.
  std::size_t basis = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (filled[k]) continue;
    r.S[k] = 0.0;
    while (basis < m) {
      std::vector<double> cand(m, 0.0);
      cand[basis++] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t c = 0; c < n; ++c) {
          if (!filled[c]) continue;
          double d = 0.0;
          for (std::size_t i = 0; i < m; ++i) d += cand[i] * r.U(i, c);
          for (std::size_t i = 0; i < m; ++i) cand[i] -= d * r.U(i, c);
        }
      }
      double norm = std::sqrt(std::inner_product(cand.begin(), cand.end(), cand.begin(), 0.0));
      if (norm > 1e-8) {
        for (std::size_t i = 0; i < m; ++i) r.U(i, k) = cand[i] / norm;
        filled[k] = true;
        break;
      }
    }
  }
  return r;
}

}  // namespace detail

/// Count of singular values above max(rows, cols) * eps * s_max.
inline std::size_t numerical_rank(std::span<const double> singular_values, std::size_t rows, std::size_t cols) {
  if (singular_values.empty() || singular_values[0] <= 0.0) return 0;
  const double tol = static_cast<double>(std::max(rows, cols)) * DBL_EPSILON * singular_values[0];
  return static_cast<std::size_t>(
      std::count_if(singular_values.begin(), singular_values.end(), [&](double s) { return s > tol; }));
}

/// Smallest k whose leading squared singular values hold at least `fraction`
/// of the total energy. Returns 0 for an all-zero spectrum.
inline std::size_t energy_rank(std::span<const double> singular_values, double fraction = 0.9) {
  double total = 0.0;
  for (double s : singular_values) total += s * s;
  if (total <= 0.0) return 0;
  double acc = 0.0;
  for (std::size_t k = 0; k < singular_values.size(); ++k) {
    acc += singular_values[k] * singular_values[k];
    if (acc >= fraction * total) return k + 1;
  }
  return singular_values.size();
}

/// SVD by one-sided Jacobi. The retained rank is min(k, numerical rank); the
/// full thin factors are kept so the input can be reconstructed.
inline SvdFactors svd(const Matrix& a, std::size_t k) {
  if (a.rows() == 0 || a.cols() == 0) throw ConfigError("cannot decompose an empty matrix");
  SvdFactors f;
  if (a.rows() >= a.cols()) {
    auto r = detail::jacobi_svd_tall(a);
    f.U = std::move(r.U);
    f.S = std::move(r.S);
    f.V = std::move(r.V);
  } else {
    auto r = detail::jacobi_svd_tall(a.transposed());
    f.U = std::move(r.V);
    f.S = std::move(r.S);
    f.V = std::move(r.U);
  }
  const std::size_t p = f.S.size();
  k = std::clamp<std::size_t>(k, 1, p);
  f.rank = std::min(k, numerical_rank(f.S, a.rows(), a.cols()));
  return f;
}

inline SvdFactors svd(const TermDocumentMatrix& tdf, std::size_t k) { return svd(tdf.to_matrix(), k); }

inline Matrix reconstruct(const SvdFactors& f) {
  Matrix out(f.U.rows(), f.V.rows());
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < f.S.size(); ++k) s += f.U(i, k) * f.S[k] * f.V(j, k);
      out(i, j) = s;
    }
  return out;
}

struct LsaScore {
  SimilarityScore score;
  /// Set when no model keyword contributes to the model weight vector.
  bool keywords_absent = false;
};

/// Cosine between the summed U*S rows of the (unique) model keywords and the
/// V*S row of the answer, over the retained rank, clamped to [0, 1].
inline LsaScore lsa_score(const SvdFactors& f, const Diction& diction, const std::vector<std::string>& model_terms,
                          std::size_t answer_column) {
  if (answer_column >= f.V.rows()) throw UsageError("answer column out of range");
  const std::size_t k = f.rank;
  std::vector<double> weight(k, 0.0);
  std::vector<bool> used(diction.size(), false);
  bool any = false;
  for (const auto& term : model_terms) {
    auto row = diction.find(term);
    if (!row || used[*row]) continue;
    used[*row] = true;
    any = true;
    for (std::size_t d = 0; d < k; ++d) weight[d] += f.U(*row, d) * f.S[d];
  }
  double wn = 0.0, an = 0.0, dot = 0.0;
  for (std::size_t d = 0; d < k; ++d) {
    double a = f.V(answer_column, d) * f.S[d];
    wn += weight[d] * weight[d];
    an += a * a;
    dot += weight[d] * a;
  }
  LsaScore out;
  out.keywords_absent = !any || wn == 0.0;
  if (out.keywords_absent || an == 0.0) return out;
  out.score = SimilarityScore(dot / (std::sqrt(wn) * std::sqrt(an)));
  return out;
}

/// How many latent dimensions to keep.
struct RankPolicy {
  std::optional<std::size_t> fixed;  ///< explicit k; otherwise the energy rule
  double energy = 0.9;
};

/// Diction, matrix and factors for one question at one phrase length, built
/// once and shared by every scoring call. Columns are student answers only.
class LatentSpace {
 public:
  LatentSpace(const std::vector<Token>& model, const std::vector<std::vector<Token>>& answers, std::size_t n,
              RankPolicy policy = {})
      : n_(n) {
    Diction diction = build_diction(model, answers, n);
    if (diction.empty()) diction.add("");  // keeps the matrix non-empty when no answer has n words
    std::vector<std::vector<std::string>> docs;
    docs.reserve(answers.size());
    for (const auto& a : answers) docs.push_back(term_stream(a, n));
    tdf_ = build_tdf(diction, docs);
    const std::size_t p = std::min(tdf_.diction.size(), tdf_.documents);
    factors_ = svd(tdf_, p);
    std::size_t k = policy.fixed ? *policy.fixed : energy_rank(factors_.S, policy.energy);
    k = std::clamp<std::size_t>(k, 1, p);
    factors_.rank = std::min(k, numerical_rank(factors_.S, tdf_.diction.size(), tdf_.documents));
  }

  std::size_t phrase_length() const { return n_; }
  const TermDocumentMatrix& tdf() const { return tdf_; }
  const SvdFactors& factors() const { return factors_; }

  LsaScore score(const std::vector<std::string>& model_terms, std::size_t answer_column) const {
    return lsa_score(factors_, tdf_.diction, model_terms, answer_column);
  }

  LsaScore score(const std::vector<Token>& model, std::size_t answer_column) const {
    return score(term_stream(model, n_), answer_column);
  }

  /// Occurrences of `terms` in the answer as predicted by the rank-k
  /// reconstruction U_k S_k V_k^T (each distinct term counted once).
  double latent_mass(const std::vector<std::string>& terms, std::size_t answer_column) const {
    const auto& f = factors_;
    std::vector<bool> used(tdf_.diction.size(), false);
    double mass = 0.0;
    for (const auto& term : terms) {
      auto row = tdf_.diction.find(term);
      if (!row || used[*row]) continue;
      used[*row] = true;
      for (std::size_t d = 0; d < f.rank; ++d) mass += f.U(*row, d) * f.S[d] * f.V(answer_column, d);
    }
    return mass;
  }

 private:
  std::size_t n_;
  TermDocumentMatrix tdf_;
  SvdFactors factors_;
};

}  // namespace ontograde
