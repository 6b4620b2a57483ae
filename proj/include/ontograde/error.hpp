#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ontograde {

/// Base of every error the library throws. The CLI maps the concrete type
/// onto its exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid call or flag combination (exit code 1).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Configuration that cannot be scored: empty corpus, n = 0, missing ontology.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Unknown concept or node id.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// Input file content that violates its format or invariants (exit code 2).
class DataError : public Error {
 public:
  enum class Kind {
    Malformed,
    SubclassCycle,
    DisjointAncestor,
    DuplicateStudent,
    ScoreRange,
    MissingModel,
    Io,
  };

  DataError(Kind kind, std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        kind_(kind),
        line_(line) {}

  Kind kind() const { return kind_; }
  /// 1-based line number, 0 when the error is not tied to a line.
  std::size_t line() const { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

}  // namespace ontograde
