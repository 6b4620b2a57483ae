#pragma once

#include <algorithm>
#include <iterator>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ontograde/error.hpp"
#include "ontograde/porter.hpp"

namespace ontograde {

/// A normalized word: the lowercased surface form and its Porter stem.
struct Token {
  std::string surface;
  std::string stem;

  friend bool operator==(const Token&, const Token&) = default;
};

/// Stems joined by single spaces; `n` is the number of words per phrase.
struct PhraseStream {
  std::size_t n = 1;
  std::vector<std::string> phrases;
};

namespace detail {

inline bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 && static_cast<unsigned char>(c) < 0x80;
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n\f\v";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

// Default English stopword list, also shipped as data/stopwords.txt.
inline constexpr std::string_view kDefaultStopwords[] = {
    "a",       "about",   "above",  "after",   "again",   "against", "all",     "am",
    "an",      "and",     "any",    "are",     "as",      "at",      "be",      "because",
    "been",    "before",  "being",  "below",   "between", "both",    "but",     "by",
    "can",     "could",   "did",    "do",      "does",    "doing",   "down",    "during",
    "each",    "few",     "for",    "from",    "further", "had",     "has",     "have",
    "having",  "he",      "her",    "here",    "hers",    "herself", "him",     "himself",
    "his",     "how",     "i",      "if",      "in",      "into",    "is",      "it",
    "its",     "itself",  "just",   "me",      "more",    "most",    "my",      "myself",
    "no",      "nor",     "not",    "now",     "of",      "off",     "on",      "once",
    "only",    "or",      "other",  "our",     "ours",    "ourselves", "out",   "over",
    "own",     "same",    "she",    "should",  "so",      "some",    "such",    "than",
    "that",    "the",     "their",  "theirs",  "them",    "themselves", "then", "there",
    "these",   "they",    "this",   "those",   "through", "to",      "too",     "under",
    "until",   "up",      "very",   "was",     "we",      "were",    "what",    "when",
    "where",   "which",   "while",  "who",     "whom",    "why",     "will",    "with",
    "would",   "you",     "your",   "yours",   "yourself", "yourselves", "also",
};

}  // namespace detail

/// Splits on every maximal run of non-alphanumeric characters and lowercases.
/// Bytes outside ASCII count as separators.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !detail::is_word_char(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && detail::is_word_char(text[i])) ++i;
    if (i > start) words.push_back(detail::to_lower(text.substr(start, i - start)));
  }
  return words;
}

/// Sentence boundaries are '.', '!', '?', ';' and newlines. Empty pieces are dropped.
inline std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    auto t = detail::trim(current);
    if (!t.empty()) out.emplace_back(t);
    current.clear();
  };
  for (char c : text) {
    if (c == '.' || c == '!' || c == '?' || c == ';' || c == '\n')
      flush();
    else
      current.push_back(c);
  }
  flush();
  return out;
}

/// Stopword set plus a symmetric synonym relation. Read-only after loading.
class Lexicon {
 public:
  Lexicon() = default;

  /// Builds the lexicon and applies symmetric closure to `synonyms`. Entries
  /// involving stopwords are dropped on both sides.
  Lexicon(std::set<std::string> stopwords, const std::map<std::string, std::set<std::string>>& synonyms)
      : stopwords_(std::move(stopwords)) {
    for (const auto& [word, syns] : synonyms) {
      for (const auto& s : syns) add_pair(word, s);
    }
  }

  static Lexicon english() {
    return Lexicon(std::set<std::string>(std::begin(detail::kDefaultStopwords), std::end(detail::kDefaultStopwords)), {});
  }

  const std::set<std::string>& stopwords() const { return stopwords_; }
  const std::map<std::string, std::set<std::string>>& synonyms() const { return synonyms_; }

  bool is_stopword(const std::string& w) const { return stopwords_.count(w) != 0; }

  const std::set<std::string>* synonyms_of(const std::string& w) const {
    auto it = synonyms_.find(w);
    return it == synonyms_.end() ? nullptr : &it->second;
  }

 private:
  void add_pair(const std::string& a, const std::string& b) {
    if (a == b || is_stopword(a) || is_stopword(b)) return;
    synonyms_[a].insert(b);
    synonyms_[b].insert(a);
  }

  std::set<std::string> stopwords_;
  std::map<std::string, std::set<std::string>> synonyms_;
};

/// One word per line; blank lines and lines starting with '#' are skipped.
inline std::set<std::string> parse_stopwords(std::istream& in) {
  std::set<std::string> words;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto toks = tokenize(t);
    if (toks.size() != 1 || toks.front().size() != t.size())
      throw DataError(DataError::Kind::Malformed, lineno, "stopword entry is not a single word: '" + std::string(t) + "'");
    words.insert(toks.front());
  }
  return words;
}

/// Lines of `word: syn1, syn2, ...`; '#' comments.
inline std::map<std::string, std::set<std::string>> parse_synonyms(std::istream& in) {
  std::map<std::string, std::set<std::string>> out;
  std::string line;
  std::size_t lineno = 0;
  auto single_word = [&](std::string_view raw) {
    auto t = detail::trim(raw);
    auto toks = tokenize(t);
    if (toks.size() != 1 || toks.front().size() != t.size())
      throw DataError(DataError::Kind::Malformed, lineno, "synonym entry is not a single word: '" + std::string(t) + "'");
    return toks.front();
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto colon = t.find(':');
    if (colon == std::string_view::npos)
      throw DataError(DataError::Kind::Malformed, lineno, "expected 'word: syn1, syn2, ...'");
    std::string head = single_word(t.substr(0, colon));
    auto& syns = out[head];
    std::string_view rest = t.substr(colon + 1);
    while (!detail::trim(rest).empty()) {
      auto comma = rest.find(',');
      syns.insert(single_word(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  }
  return out;
}

inline std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(DataError::Kind::Io, 0, "cannot open " + path);
  return in;
}

/// Loads a lexicon from files. An empty stopword path selects the built-in
/// English list; an empty synonym path means no synonyms.
inline Lexicon load_lexicon(const std::string& stopword_path, const std::string& synonym_path) {
  std::set<std::string> stop;
  if (stopword_path.empty()) {
    stop = Lexicon::english().stopwords();
  } else {
    auto in = open_or_throw(stopword_path);
    stop = parse_stopwords(in);
  }
  std::map<std::string, std::set<std::string>> syn;
  if (!synonym_path.empty()) {
    auto in = open_or_throw(synonym_path);
    syn = parse_synonyms(in);
  }
  return Lexicon(std::move(stop), syn);
}

inline std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens, const Lexicon& lex) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens)
    if (!lex.is_stopword(t)) out.push_back(t);
  return out;
}

/// Original tokens (with multiplicity) followed by each token's synonyms in
/// sorted order; a synonym is appended only if it is not already present.
inline std::vector<std::string> expand_synonyms(const std::vector<std::string>& tokens, const Lexicon& lex) {
  std::vector<std::string> out = tokens;
  std::set<std::string> seen(tokens.begin(), tokens.end());
  for (const auto& t : tokens) {
    const auto* syns = lex.synonyms_of(t);
    if (!syns) continue;
    for (const auto& s : *syns)
      if (seen.insert(s).second) out.push_back(s);
  }
  return out;
}

inline std::string stem(std::string_view word) { return porter_stem(word); }

/// tokenize -> remove_stopwords -> expand_synonyms -> stem.
inline std::vector<Token> preprocess_pipeline(std::string_view text, const Lexicon& lex) {
  auto words = expand_synonyms(remove_stopwords(tokenize(text), lex), lex);
  std::vector<Token> out;
  out.reserve(words.size());
  for (auto& w : words) {
    std::string s = stem(w);
    out.push_back(Token{std::move(w), std::move(s)});
  }
  return out;
}

inline PhraseStream ngrams(const std::vector<Token>& tokens, std::size_t n) {
  if (n == 0) throw ConfigError("n-gram length must be at least 1");
  PhraseStream ps;
  ps.n = n;
  if (tokens.size() < n) return ps;
  ps.phrases.reserve(tokens.size() - n + 1);
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string phrase = tokens[i].stem;
    for (std::size_t j = 1; j < n; ++j) {
      phrase += ' ';
      phrase += tokens[i + j].stem;
    }
    ps.phrases.push_back(std::move(phrase));
  }
  return ps;
}

inline std::vector<std::string> stems_of(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.stem);
  return out;
}

}  // namespace ontograde
