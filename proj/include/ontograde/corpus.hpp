#pragma once

#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ontograde/error.hpp"
#include "ontograde/ontology.hpp"
#include "ontograde/preprocess.hpp"

namespace ontograde {

struct StudentAnswer {
  std::string id;
  std::string text;
  std::optional<double> score;  ///< human mark in [0, max_marks]
  bool calibration = false;     ///< also used as a MaxEnt training example
};

/// One question: its model answers and every student answer.
struct Corpus {
  std::string question_id;
  std::string question_text;
  QuestionType question_type = QuestionType::Short;
  std::optional<std::string> main_concept;
  std::vector<std::string> model_answers;
  std::vector<StudentAnswer> student_answers;
  double max_marks = 10.0;

  bool has_human_scores() const {
    for (const auto& a : student_answers)
      if (a.score) return true;
    return false;
  }
};

namespace detail {

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::optional<double> parse_double(std::string_view s) {
  std::string str(s);
  if (str.empty()) return std::nullopt;
  char* end = nullptr;
  double v = std::strtod(str.c_str(), &end);
  if (end != str.c_str() + str.size() || std::isnan(v) || std::isinf(v)) return std::nullopt;
  return v;
}

struct PendingScore {
  std::size_t line;
  double value;
  std::string id;
};

class CorpusParser {
 public:
  std::vector<Corpus> parse(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
      ++lineno_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      auto t = trim(line);
      if (!t.empty() && t.front() == '#') continue;
      if (!t.empty() && t.front() == '[' && t.back() == ']') {
        header(t.substr(1, t.size() - 2));
        continue;
      }
      switch (section_) {
        case Section::None:
          if (!t.empty()) fail("text outside of any section");
          break;
        case Section::Question:
          if (!t.empty()) question_key(t);
          break;
        case Section::Model:
        case Section::Answer:
          block_.push_back(line);
          break;
      }
    }
    close_block();
    finish_question();
    return std::move(out_);
  }

 private:
  enum class Section { None, Question, Model, Answer };

  [[noreturn]] void fail(const std::string& msg, DataError::Kind kind = DataError::Kind::Malformed) const {
    throw DataError(kind, lineno_, msg);
  }

  void header(std::string_view body) {
    close_block();
    std::istringstream ss{std::string(body)};
    std::string name;
    ss >> name;
    std::map<std::string, std::string> attrs;
    std::string kv;
    while (ss >> kv) {
      auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) fail("expected key=value in header, got '" + kv + "'");
      if (!attrs.emplace(kv.substr(0, eq), kv.substr(eq + 1)).second) fail("repeated header attribute '" + kv + "'");
    }
    if (name == "question") {
      if (!attrs.empty()) fail("[question] takes no attributes");
      finish_question();
      current_ = Corpus{};
      question_line_ = lineno_;
      section_ = Section::Question;
    } else if (name == "model") {
      need_question();
      if (!attrs.empty()) fail("[model] takes no attributes");
      section_ = Section::Model;
    } else if (name == "answer") {
      need_question();
      StudentAnswer a;
      for (const auto& [k, v] : attrs) {
        if (k == "id") {
          a.id = v;
        } else if (k == "score") {
          auto d = parse_double(v);
          if (!d) fail("invalid score '" + v + "'");
          a.score = *d;
          pending_.push_back({lineno_, *d, ""});
        } else if (k == "calibration") {
          if (v != "true" && v != "false") fail("calibration must be true or false");
          a.calibration = v == "true";
        } else {
          fail("unknown answer attribute '" + k + "'");
        }
      }
      if (a.id.empty()) fail("answer without id");
      if (!seen_ids_.insert(a.id).second)
        fail("duplicate student id '" + a.id + "'", DataError::Kind::DuplicateStudent);
      if (!pending_.empty() && pending_.back().line == lineno_) pending_.back().id = a.id;
      current_->student_answers.push_back(std::move(a));
      section_ = Section::Answer;
    } else {
      fail("unknown section [" + name + "]");
    }
  }

  void need_question() const {
    if (!current_) fail("section before any [question]");
  }

  void question_key(std::string_view t) {
    auto eq = t.find('=');
    if (eq == std::string_view::npos) fail("expected key=value");
    std::string key(trim(t.substr(0, eq)));
    std::string value(trim(t.substr(eq + 1)));
    if (key == "id") {
      if (value.empty() || has_space(value)) fail("question id must be a non-empty word");
      current_->question_id = value;
    } else if (key == "type") {
      auto q = parse_question_type(value);
      if (!q) fail("unknown question type '" + value + "'");
      current_->question_type = *q;
    } else if (key == "concept") {
      if (value.empty() || has_space(value)) fail("concept must be a single node id");
      current_->main_concept = value;
    } else if (key == "max_marks") {
      auto d = parse_double(value);
      if (!d || *d <= 0.0) fail("max_marks must be a positive number");
      current_->max_marks = *d;
    } else if (key == "text") {
      current_->question_text = value;
    } else {
      fail("unknown question key '" + key + "'");
    }
  }

  void close_block() {
    if (section_ == Section::Model || section_ == Section::Answer) {
      while (!block_.empty() && trim(block_.back()).empty()) block_.pop_back();
      std::size_t first = 0;
      while (first < block_.size() && trim(block_[first]).empty()) ++first;
      std::string text;
      for (std::size_t i = first; i < block_.size(); ++i) {
        if (i > first) text += '\n';
        text += block_[i];
      }
      if (section_ == Section::Model)
        current_->model_answers.push_back(std::move(text));
      else
        current_->student_answers.back().text = std::move(text);
    }
    block_.clear();
  }

  void finish_question() {
    if (!current_) return;
    if (current_->question_id.empty())
      throw DataError(DataError::Kind::Malformed, question_line_, "question without id");
    if (!question_ids_.insert(current_->question_id).second)
      throw DataError(DataError::Kind::Malformed, question_line_, "duplicate question id '" + current_->question_id + "'");
    if (current_->model_answers.empty())
      throw DataError(DataError::Kind::MissingModel, question_line_,
                      "question '" + current_->question_id + "' has no [model] answer");
    for (const auto& p : pending_)
      if (p.value < 0.0 || p.value > current_->max_marks)
        throw DataError(DataError::Kind::ScoreRange, p.line,
                        "score " + format_number(p.value) + " of '" + p.id + "' outside [0, " +
                            format_number(current_->max_marks) + "]");
    out_.push_back(std::move(*current_));
    current_.reset();
    pending_.clear();
    seen_ids_.clear();
    section_ = Section::None;
  }

  std::vector<Corpus> out_;
  std::optional<Corpus> current_;
  std::vector<std::string> block_;
  std::vector<PendingScore> pending_;
  std::set<std::string> seen_ids_;
  std::set<std::string> question_ids_;
  Section section_ = Section::None;
  std::size_t lineno_ = 0;
  std::size_t question_line_ = 0;
};

}  // namespace detail

/// Parses every [question] section of a corpus file.
inline std::vector<Corpus> parse_corpora(std::istream& in) { return detail::CorpusParser().parse(in); }

inline std::vector<Corpus> load_corpora(const std::string& path) {
  auto in = open_or_throw(path);
  return parse_corpora(in);
}

/// Single-question variant; errors if the file does not hold exactly one question.
inline Corpus load_corpus(std::istream& in) {
  auto all = parse_corpora(in);
  if (all.size() != 1)
    throw DataError(DataError::Kind::Malformed, 0, "expected exactly one [question], found " + std::to_string(all.size()));
  return std::move(all.front());
}

inline void write_corpus(std::ostream& out, const Corpus& c) {
  out << "[question]\n";
  out << "id=" << c.question_id << '\n';
  out << "type=" << to_string(c.question_type) << '\n';
  if (c.main_concept) out << "concept=" << *c.main_concept << '\n';
  out << "max_marks=" << detail::format_number(c.max_marks) << '\n';
  if (!c.question_text.empty()) out << "text=" << c.question_text << '\n';
  for (const auto& m : c.model_answers) out << "[model]\n" << m << '\n';
  for (const auto& a : c.student_answers) {
    out << "[answer id=" << a.id;
    if (a.score) out << " score=" << detail::format_number(*a.score);
    if (a.calibration) out << " calibration=true";
    out << "]\n" << a.text << '\n';
  }
}

inline void write_corpora(std::ostream& out, const std::vector<Corpus>& corpora) {
  for (std::size_t i = 0; i < corpora.size(); ++i) {
    if (i) out << '\n';
    write_corpus(out, corpora[i]);
  }
}

}  // namespace ontograde
