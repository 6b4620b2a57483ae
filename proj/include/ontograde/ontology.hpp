#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "ontograde/error.hpp"
#include "ontograde/preprocess.hpp"
#include "ontograde/vectorspace.hpp"

namespace ontograde {

namespace predicate {
inline constexpr std::string_view kSubclassOf = "subclass-of";
inline constexpr std::string_view kInstanceOf = "instance-of";
inline constexpr std::string_view kEquivalentTo = "equivalent-to";
inline constexpr std::string_view kDisjointWith = "disjoint-with";
inline constexpr std::string_view kPartOf = "part-of";
inline constexpr std::string_view kPredecessor = "predecessor";
inline constexpr std::string_view kSuccessor = "successor";
inline constexpr std::string_view kActor = "actor";
inline constexpr std::string_view kTarget = "target";
inline constexpr std::string_view kInputToEvent = "input_to_event";
inline constexpr std::string_view kOutputOfEvent = "output_of_event";
inline constexpr std::string_view kPartOfEvent = "part_of_event";

inline bool is_structural(std::string_view p) {
  return p == kSubclassOf || p == kInstanceOf || p == kEquivalentTo || p == kDisjointWith;
}

inline bool is_event_role(std::string_view p) {
  return p == kActor || p == kTarget || p == kInputToEvent || p == kOutputOfEvent || p == kPartOfEvent ||
         p == kPredecessor || p == kSuccessor;
}

// Relations whose object must be a node, never a literal.
inline bool requires_node_object(std::string_view p) { return is_structural(p) || p == kPartOf || is_event_role(p); }

inline bool is_event_step(std::string_view p) { return p == kPredecessor || p == kSuccessor || p == kPartOfEvent; }
}  // namespace predicate

struct Triple {
  std::string subject;
  std::string predicate;
  std::string object;
  bool object_is_literal = false;
  std::size_t line = 0;  ///< source line, not part of identity

  auto key() const { return std::tie(subject, predicate, object, object_is_literal); }
  friend bool operator==(const Triple& a, const Triple& b) { return a.key() == b.key(); }
  friend bool operator<(const Triple& a, const Triple& b) { return a.key() < b.key(); }
};

namespace detail {

inline bool has_space(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; });
}

inline std::optional<std::string> unquote(std::string_view s) {
  if (s.size() < 2 || s.front() != '"' || s.back() != '"') return std::nullopt;
  std::string out;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    char c = s[i];
    if (c == '"') return std::nullopt;
    if (c != '\\') {
      out.push_back(c);
      continue;
    }
    if (i + 2 >= s.size()) return std::nullopt;
    switch (s[++i]) {
      case '"': out.push_back('"'); break;
      case '\\': out.push_back('\\'); break;
      case 't': out.push_back('\t'); break;
      case 'n': out.push_back('\n'); break;
      default: return std::nullopt;
    }
  }
  return out;
}

inline std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

}  // namespace detail

/// Parses `subject<TAB>predicate<TAB>object` lines. Blank lines and lines
/// starting with '#' are skipped; a double-quoted object is a literal.
inline std::vector<Triple> parse_triples(std::istream& in) {
  std::vector<Triple> out;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) { throw DataError(DataError::Kind::Malformed, lineno, msg); };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto tab1 = line.find('\t');
    auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) fail("expected subject<TAB>predicate<TAB>object");
    Triple tr;
    tr.line = lineno;
    tr.subject = std::string(detail::trim(std::string_view(line).substr(0, tab1)));
    tr.predicate = std::string(detail::trim(std::string_view(line).substr(tab1 + 1, tab2 - tab1 - 1)));
    auto obj = detail::trim(std::string_view(line).substr(tab2 + 1));
    if (tr.subject.empty() || tr.predicate.empty() || obj.empty()) fail("empty subject, predicate or object");
    if (detail::has_space(tr.subject) || detail::has_space(tr.predicate)) fail("subject and predicate must not contain whitespace");
    if (tr.subject.front() == '"') fail("subject cannot be a literal");
    if (obj.front() == '"') {
      auto lit = detail::unquote(obj);
      if (!lit) fail("malformed literal " + std::string(obj));
      tr.object = *lit;
      tr.object_is_literal = true;
      if (predicate::requires_node_object(tr.predicate)) fail("predicate '" + tr.predicate + "' needs a node object");
    } else {
      if (detail::has_space(obj)) fail("unquoted object must not contain whitespace");
      tr.object = std::string(obj);
    }
    out.push_back(std::move(tr));
  }
  return out;
}

/// Immutable triple set with typed views.
class OntologyStore {
 public:
  using PropertyValue = std::pair<std::string, std::string>;  // predicate, value

  OntologyStore() = default;

  /// Validates and indexes `triples`. Throws DataError on a subclass cycle or
  /// on disjointness between a class and one of its ancestors.
  explicit OntologyStore(std::vector<Triple> triples) {
    std::set<Triple> uniq;
    for (auto& t : triples)
      if (uniq.insert(t).second) triples_.push_back(std::move(t));
    if (triples_.empty()) warnings_.push_back("ontology is empty");
    for (const auto& t : triples_) index(t);
    check_acyclic();
    check_disjointness();
    for (const auto& [ind, classes] : class_of_) {
      for (const auto& c : classes)
        if (is_event_class(c)) events_.insert(ind);
      if (properties_.count(ind))
        for (const auto& [p, v] : properties_.at(ind))
          if (predicate::is_event_role(p)) events_.insert(ind);
    }
  }

  const std::vector<Triple>& triples() const { return triples_; }
  const std::set<std::string>& nodes() const { return nodes_; }
  const std::set<std::string>& classes() const { return classes_; }
  const std::map<std::string, std::set<std::string>>& individuals() const { return individuals_; }
  const std::set<std::string>& events() const { return events_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  bool has_node(const std::string& n) const { return nodes_.count(n) != 0; }

  const std::set<std::string>& subclasses(const std::string& c) const { return lookup(children_, c); }
  const std::set<std::string>& superclasses(const std::string& c) const { return lookup(parents_, c); }
  const std::set<std::string>& equivalents(const std::string& c) const { return lookup(equivalent_, c); }
  const std::set<std::string>& disjoints(const std::string& c) const { return lookup(disjoint_, c); }
  const std::set<std::string>& instances(const std::string& c) const { return lookup(individuals_, c); }
  const std::set<std::string>& neighbours(const std::string& n) const { return lookup(adjacency_, n); }

  /// Non-structural (predicate, value) pairs with `n` as subject.
  const std::vector<PropertyValue>& properties(const std::string& n) const {
    static const std::vector<PropertyValue> none;
    auto it = properties_.find(n);
    return it == properties_.end() ? none : it->second;
  }

  /// Nodes X with a non-structural node edge (X, p, n).
  const std::set<std::string>& inverse_related(const std::string& n) const { return lookup(inverse_, n); }

  /// Nodes linked to `n` by a part-of edge in either direction.
  const std::set<std::string>& part_of_related(const std::string& n) const { return lookup(part_of_, n); }

  /// Events linked to `n` by predecessor, successor or part_of_event in either direction.
  const std::set<std::string>& event_steps(const std::string& n) const { return lookup(steps_, n); }

  std::set<std::string> ancestors(const std::string& c) const {
    std::set<std::string> out;
    std::vector<std::string> stack(superclasses(c).begin(), superclasses(c).end());
    while (!stack.empty()) {
      auto x = std::move(stack.back());
      stack.pop_back();
      if (!out.insert(x).second) continue;
      for (const auto& p : superclasses(x)) stack.push_back(p);
    }
    return out;
  }

 private:
  static const std::set<std::string>& lookup(const std::map<std::string, std::set<std::string>>& m,
                                             const std::string& k) {
    static const std::set<std::string> none;
    auto it = m.find(k);
    return it == m.end() ? none : it->second;
  }

  bool is_event_class(const std::string& c) const {
    if (c == "event" || c == "Event") return true;
    for (const auto& a : ancestors(c))
      if (a == "event" || a == "Event") return true;
    return false;
  }

  void index(const Triple& t) {
    const auto& s = t.subject;
    const auto& p = t.predicate;
    const auto& o = t.object;
    nodes_.insert(s);
    if (t.object_is_literal) {
      properties_[s].emplace_back(p, o);
      return;
    }
    nodes_.insert(o);
    if (s != o) {
      adjacency_[s].insert(o);
      adjacency_[o].insert(s);
    }
    if (p == predicate::kSubclassOf) {
      classes_.insert(s);
      classes_.insert(o);
      parents_[s].insert(o);
      children_[o].insert(s);
      subclass_lines_[{s, o}] = t.line;
    } else if (p == predicate::kInstanceOf) {
      classes_.insert(o);
      individuals_[o].insert(s);
      class_of_[s].insert(o);
    } else if (p == predicate::kEquivalentTo) {
      classes_.insert(s);
      classes_.insert(o);
      equivalent_[s].insert(o);
      equivalent_[o].insert(s);
    } else if (p == predicate::kDisjointWith) {
      classes_.insert(s);
      classes_.insert(o);
      disjoint_[s].insert(o);
      disjoint_[o].insert(s);
      disjoint_lines_.emplace_back(std::make_pair(s, o), t.line);
    } else {
      properties_[s].emplace_back(p, o);
      inverse_[o].insert(s);
      if (p == predicate::kPartOf) {
        part_of_[s].insert(o);
        part_of_[o].insert(s);
      }
      if (predicate::is_event_step(p)) {
        steps_[s].insert(o);
        steps_[o].insert(s);
      }
    }
  }

  void check_acyclic() const {
    enum class Mark { None, Active, Done };
    std::map<std::string, Mark> mark;
    std::function<void(const std::string&)> visit = [&](const std::string& c) {
      mark[c] = Mark::Active;
      for (const auto& p : superclasses(c)) {
        auto m = mark[p];
        if (m == Mark::Active)
          throw DataError(DataError::Kind::SubclassCycle, subclass_lines_.at({c, p}),
                          "subclass cycle through '" + c + "' and '" + p + "'");
        if (m == Mark::None) visit(p);
      }
      mark[c] = Mark::Done;
    };
    for (const auto& [c, parents] : parents_)
      if (mark[c] == Mark::None) visit(c);
  }

  void check_disjointness() const {
    for (const auto& [pair, line] : disjoint_lines_) {
      const auto& [a, b] = pair;
      if (a == b || ancestors(a).count(b) || ancestors(b).count(a))
        throw DataError(DataError::Kind::DisjointAncestor, line,
                        "'" + a + "' disjoint-with '" + b + "' conflicts with the subclass hierarchy");
    }
  }

  std::vector<Triple> triples_;
  std::vector<std::string> warnings_;
  std::set<std::string> nodes_;
  std::set<std::string> classes_;
  std::set<std::string> events_;
  std::map<std::string, std::set<std::string>> individuals_;
  std::map<std::string, std::set<std::string>> class_of_;
  std::map<std::string, std::set<std::string>> parents_;
  std::map<std::string, std::set<std::string>> children_;
  std::map<std::string, std::set<std::string>> equivalent_;
  std::map<std::string, std::set<std::string>> disjoint_;
  std::map<std::string, std::set<std::string>> adjacency_;
  std::map<std::string, std::set<std::string>> inverse_;
  std::map<std::string, std::set<std::string>> part_of_;
  std::map<std::string, std::set<std::string>> steps_;
  std::map<std::string, std::vector<PropertyValue>> properties_;
  std::map<std::pair<std::string, std::string>, std::size_t> subclass_lines_;
  std::vector<std::pair<std::pair<std::string, std::string>, std::size_t>> disjoint_lines_;
};

inline OntologyStore load_ontology(std::istream& in) { return OntologyStore(parse_triples(in)); }

inline OntologyStore load_ontology_file(const std::string& path) {
  auto in = open_or_throw(path);
  return load_ontology(in);
}

/// Writes the store back in the triple format, one triple per line, sorted.
inline std::string serialize(const OntologyStore& store) {
  std::vector<Triple> sorted = store.triples();
  std::sort(sorted.begin(), sorted.end());
  std::string out;
  for (const auto& t : sorted) {
    out += t.subject;
    out += '\t';
    out += t.predicate;
    out += '\t';
    out += t.object_is_literal ? detail::quote(t.object) : t.object;
    out += '\n';
  }
  return out;
}

enum class QuestionType { OneLine, Short, Long, Essay };

inline std::optional<QuestionType> parse_question_type(std::string_view s) {
  auto lower = detail::to_lower(s);
  if (lower == "oneline" || lower == "one-line" || lower == "one_line") return QuestionType::OneLine;
  if (lower == "short") return QuestionType::Short;
  if (lower == "long") return QuestionType::Long;
  if (lower == "essay") return QuestionType::Essay;
  return std::nullopt;
}

inline const char* to_string(QuestionType q) {
  switch (q) {
    case QuestionType::OneLine: return "oneline";
    case QuestionType::Short: return "short";
    case QuestionType::Long: return "long";
    case QuestionType::Essay: return "essay";
  }
  return "short";
}

/// Concept -> stem set, the unit every ontology-augmented technique matches
/// against. `surfaces` keeps the unstemmed words for techniques that work on
/// raw text.
struct ConceptWordMap {
  std::string main_concept;
  std::vector<std::string> concepts;
  std::map<std::string, std::set<std::string>> words;
  std::map<std::string, std::set<std::string>> surfaces;

  const std::set<std::string>& words_of(const std::string& c) const {
    auto it = words.find(c);
    if (it == words.end()) throw LookupError("concept '" + c + "' is not in the concept map");
    return it->second;
  }

  std::set<std::string> all_words() const {
    std::set<std::string> out;
    for (const auto& [c, w] : words) out.insert(w.begin(), w.end());
    return out;
  }
};

/// Hop counts between concepts; kUnreachable when no path exists.
class ConceptDistanceTable {
 public:
  static constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

  ConceptDistanceTable() = default;
  ConceptDistanceTable(std::vector<std::string> concepts, std::map<std::pair<std::string, std::string>, std::size_t> d)
      : concepts_(std::move(concepts)), dist_(std::move(d)) {}

  std::size_t operator()(const std::string& a, const std::string& b) const {
    if (a == b) return 0;
    auto it = dist_.find({a, b});
    if (it == dist_.end()) return kUnreachable;
    return it->second;
  }

  const std::vector<std::string>& concepts() const { return concepts_; }

 private:
  std::vector<std::string> concepts_;
  std::map<std::pair<std::string, std::string>, std::size_t> dist_;
};

/// Breadth-first hop counts from `source` over the undirected node graph.
inline std::map<std::string, std::size_t> bfs_distances(const OntologyStore& store, const std::string& source) {
  if (!store.has_node(source)) throw LookupError("unknown concept '" + source + "'");
  std::map<std::string, std::size_t> dist{{source, 0}};
  std::deque<std::string> queue{source};
  while (!queue.empty()) {
    auto cur = std::move(queue.front());
    queue.pop_front();
    const std::size_t d = dist[cur];
    for (const auto& n : store.neighbours(cur))
      if (dist.emplace(n, d + 1).second) queue.push_back(n);
  }
  return dist;
}

/// Shortest path length over every triple linking two nodes, ignoring
/// direction; kUnreachable when disconnected.
inline std::size_t concept_distance(const OntologyStore& store, const std::string& a, const std::string& b) {
  if (!store.has_node(b)) throw LookupError("unknown concept '" + b + "'");
  auto d = bfs_distances(store, a);
  auto it = d.find(b);
  return it == d.end() ? ConceptDistanceTable::kUnreachable : it->second;
}

inline ConceptDistanceTable build_distance_table(const OntologyStore& store, const std::vector<std::string>& concepts) {
  std::map<std::pair<std::string, std::string>, std::size_t> d;
  for (const auto& a : concepts) {
    auto from = bfs_distances(store, a);
    for (const auto& b : concepts) {
      auto it = from.find(b);
      if (it != from.end()) d[{a, b}] = it->second;
    }
  }
  return ConceptDistanceTable(concepts, std::move(d));
}

namespace detail {

inline std::string node_label(std::string_view id) {
  std::string out(id);
  for (char& c : out)
    if (c == '_' || c == '-') c = ' ';
  return out;
}

// Everything the ontology says about one concept, as text fragments: its own
// label, its attribute values, its instances with their attribute values,
// and the names of its direct subclasses. Part-of and event-role edges link
// to other concepts and add no words.
inline std::vector<std::string> concept_text(const OntologyStore& store, const std::string& c) {
  std::vector<std::string> text{node_label(c)};
  auto attributes = [&](const std::string& n) {
    for (const auto& [p, v] : store.properties(n))
      if (!predicate::requires_node_object(p)) text.push_back(node_label(v));
  };
  attributes(c);
  for (const auto& ind : store.instances(c)) {
    text.push_back(node_label(ind));
    attributes(ind);
  }
  for (const auto& sub : store.subclasses(c)) text.push_back(node_label(sub));
  return text;
}

}  // namespace detail

/// Concepts fetched for a question, by question type:
///   OneLine  the main concept alone (its properties, instances, direct subclasses);
///   Short    the main concept and every class below it;
///   Long     Short plus equivalent classes and inverse-related nodes of that set;
///   Essay    Long plus part-of relatives, event steps (transitively), and
///            every node within two hops of the main concept.
inline ConceptWordMap extract_concepts(const OntologyStore& store, const std::string& main_concept, QuestionType qtype,
                                       const Lexicon& lex) {
  if (!store.has_node(main_concept)) throw LookupError("unknown concept '" + main_concept + "'");
  std::vector<std::string> order;
  std::set<std::string> chosen;
  auto add = [&](const std::string& c) {
    if (chosen.insert(c).second) order.push_back(c);
  };
  add(main_concept);

  if (qtype != QuestionType::OneLine) {
    std::deque<std::string> queue{main_concept};
    while (!queue.empty()) {
      auto cur = std::move(queue.front());
      queue.pop_front();
      for (const auto& sub : store.subclasses(cur))
        if (!chosen.count(sub)) {
          add(sub);
          queue.push_back(sub);
        }
    }
  }
  if (qtype == QuestionType::Long || qtype == QuestionType::Essay) {
    const std::vector<std::string> subtree = order;
    for (const auto& c : subtree) {
      for (const auto& e : store.equivalents(c)) add(e);
      for (const auto& x : store.inverse_related(c)) add(x);
    }
  }
  if (qtype == QuestionType::Essay) {
    const std::vector<std::string> base = order;
    for (const auto& c : base)
      for (const auto& x : store.part_of_related(c)) add(x);
    std::vector<std::string> frontier(order.begin(), order.end());
    while (!frontier.empty()) {
      auto cur = std::move(frontier.back());
      frontier.pop_back();
      for (const auto& step : store.event_steps(cur))
        if (store.events().count(step) && !chosen.count(step)) {
          add(step);
          frontier.push_back(step);
        }
    }
    for (const auto& [node, d] : bfs_distances(store, main_concept))
      if (d <= 2) add(node);
  }

  ConceptWordMap map;
  map.main_concept = main_concept;
  map.concepts = order;
  for (const auto& c : order) {
    auto& stems = map.words[c];
    auto& surf = map.surfaces[c];
    for (const auto& frag : detail::concept_text(store, c))
      for (const auto& tok : preprocess_pipeline(frag, lex)) {
        stems.insert(tok.stem);
        surf.insert(tok.surface);
      }
    if (stems.empty()) throw ConfigError("concept '" + c + "' has no words after preprocessing");
  }
  return map;
}

/// Assigns each model-answer sentence to the concept sharing the most
/// distinct stems with it (ties: nearer the main concept, then concept id)
/// and merges the sentence's words into that concept. Sentences that share
/// nothing go to the main concept.
inline ConceptWordMap cluster_model_answer(const ConceptWordMap& map, const ConceptDistanceTable& dist,
                                           const std::vector<std::vector<Token>>& sentences) {
  if (map.concepts.empty()) throw ConfigError("cannot cluster against an empty concept map");
  ConceptWordMap out = map;
  for (const auto& sentence : sentences) {
    std::set<std::string> stems;
    for (const auto& t : sentence) stems.insert(t.stem);
    const std::string* best = &map.main_concept;
    std::size_t best_overlap = 0;
    std::size_t best_dist = 0;
    for (const auto& c : map.concepts) {
      const auto& w = map.words_of(c);
      std::size_t overlap = 0;
      for (const auto& s : stems) overlap += w.count(s);
      if (overlap == 0) continue;
      std::size_t d = dist(map.main_concept, c);
      bool better = overlap > best_overlap || (overlap == best_overlap && (d < best_dist || (d == best_dist && c < *best)));
      if (better) {
        best = &c;
        best_overlap = overlap;
        best_dist = d;
      }
    }
    for (const auto& t : sentence) {
      out.words[*best].insert(t.stem);
      out.surfaces[*best].insert(t.surface);
    }
  }
  return out;
}

enum class DistanceWeighting { Inverse, Literal };

inline std::optional<DistanceWeighting> parse_distance_weighting(std::string_view s) {
  if (s == "inverse") return DistanceWeighting::Inverse;
  if (s == "literal") return DistanceWeighting::Literal;
  return std::nullopt;
}

/// 1/(1 + d) for Inverse, d for Literal; unreachable concepts weigh 0.
inline double concept_weight(std::size_t distance, DistanceWeighting w) {
  if (distance == ConceptDistanceTable::kUnreachable) return 0.0;
  if (w == DistanceWeighting::Literal) return static_cast<double>(distance);
  return 1.0 / (1.0 + static_cast<double>(distance));
}

/// Sum of weight(c) over concepts whose per-concept score is positive,
/// divided by the number of concepts. `per_concept` maps a concept id to the
/// wrapped technique's score of the answer against that concept.
template <class PerConceptScore>
SimilarityScore ontology_augmented_score(const ConceptWordMap& map, const ConceptDistanceTable& dist,
                                         PerConceptScore&& per_concept,
                                         DistanceWeighting weighting = DistanceWeighting::Inverse) {
  if (map.concepts.empty()) throw ConfigError("ontology-augmented scoring needs a non-empty concept map");
  double sum = 0.0;
  for (const auto& c : map.concepts) {
    double s = per_concept(c);
    if (s > 0.0) sum += concept_weight(dist(map.main_concept, c), weighting);
  }
  return SimilarityScore(sum / static_cast<double>(map.concepts.size()));
}

}  // namespace ontograde
