#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "ontograde/error.hpp"
#include "ontograde/grade.hpp"
#include "ontograde/vectorspace.hpp"

namespace ontograde {

enum class ReportFormat { Csv, Json };

namespace detail {

inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace detail

/// Per-answer rows: question_id,student_id,technique,machine,human. Scores
/// use six decimals; a missing human score is an empty field.
inline void write_csv(std::ostream& out, const ScoreReport& report) {
  out << "question_id,student_id,technique,machine,human\n";
  for (const auto& r : report.per_answer) {
    out << detail::csv_field(r.question_id) << ',' << detail::csv_field(r.student_id) << ',' << to_string(r.technique)
        << ',' << detail::fixed6(r.machine) << ',';
    if (r.human) out << detail::fixed6(*r.human);
    out << '\n';
  }
}

/// question_id,technique,pearson with "undefined" for constant series.
inline void write_correlations_csv(std::ostream& out, const ScoreReport& report) {
  out << "question_id,technique,pearson\n";
  for (const auto& r : report.per_question)
    out << detail::csv_field(r.question_id) << ',' << to_string(r.technique) << ','
        << (r.pearson ? detail::fixed6(*r.pearson) : std::string("undefined")) << '\n';
}

inline nlohmann::json to_json(const ScoreReport& report) {
  nlohmann::json answers = nlohmann::json::array();
  for (const auto& r : report.per_answer) {
    answers.push_back({{"question_id", r.question_id},
                       {"student_id", r.student_id},
                       {"technique", to_string(r.technique)},
                       {"machine", r.machine},
                       {"human", r.human ? nlohmann::json(*r.human) : nlohmann::json(nullptr)}});
  }
  nlohmann::json questions = nlohmann::json::array();
  for (const auto& r : report.per_question) {
    questions.push_back({{"question_id", r.question_id},
                         {"technique", to_string(r.technique)},
                         {"pearson", r.pearson ? nlohmann::json(*r.pearson) : nlohmann::json("undefined")}});
  }
  nlohmann::json summary = nlohmann::json::array();
  for (const auto& s : summarize(report)) {
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json("undefined"); };
    summary.push_back({{"technique", to_string(s.technique)}, {"max", opt(s.max)}, {"min", opt(s.min)}});
  }
  return {{"per_answer", answers}, {"per_question", questions}, {"summary", summary}};
}

inline ScoreReport report_from_json(const nlohmann::json& j) {
  auto technique = [](const nlohmann::json& v) {
    auto t = parse_technique(v.get<std::string>());
    if (!t) throw DataError(DataError::Kind::Malformed, 0, "unknown technique " + v.dump());
    return *t;
  };
  ScoreReport r;
  try {
    for (const auto& a : j.at("per_answer")) {
      AnswerRow row{a.at("question_id").get<std::string>(), a.at("student_id").get<std::string>(),
                    technique(a.at("technique")), a.at("machine").get<double>(), std::nullopt};
      if (!a.at("human").is_null()) row.human = a.at("human").get<double>();
      r.per_answer.push_back(std::move(row));
    }
    for (const auto& q : j.at("per_question")) {
      CorrelationRow row{q.at("question_id").get<std::string>(), technique(q.at("technique")), std::nullopt};
      if (q.at("pearson").is_number()) row.pearson = q.at("pearson").get<double>();
      r.per_question.push_back(std::move(row));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(DataError::Kind::Malformed, 0, std::string("malformed report: ") + e.what());
  }
  return r;
}

inline void write_report(std::ostream& out, const ScoreReport& report, ReportFormat fmt) {
  if (fmt == ReportFormat::Csv)
    write_csv(out, report);
  else
    out << to_json(report).dump(2) << '\n';
}

inline void emit_report(const ScoreReport& report, ReportFormat fmt, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(DataError::Kind::Io, 0, "cannot write " + path);
  write_report(out, report, fmt);
  out.flush();
  if (!out) throw DataError(DataError::Kind::Io, 0, "write failed for " + path);
}

inline std::string report_string(const ScoreReport& report, ReportFormat fmt) {
  std::ostringstream ss;
  write_report(ss, report, fmt);
  return ss.str();
}

/// Diagnostic dump of one latent space.
inline nlohmann::json to_json(const LatentSpace& space) {
  const auto& f = space.factors();
  auto matrix = [](const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  return {{"phrase_length", space.phrase_length()},
          {"diction", space.tdf().diction.entries()},
          {"documents", space.tdf().documents},
          {"singular_values", f.S},
          {"rank", f.rank},
          {"U", matrix(f.U)},
          {"V", matrix(f.V)}};
}

}  // namespace ontograde
