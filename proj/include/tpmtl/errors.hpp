#pragma once

#include <stdexcept>
#include <string>

namespace tpmtl {

// Base for all library errors so callers can catch one type.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid configuration or argument values (caller mistake).
struct ValidationError : Error {
  using Error::Error;
};

struct EmptyActivity : ValidationError {
  EmptyActivity() : ValidationError("activity has no actions") {}
};

struct InvalidInterval : ValidationError {
  explicit InvalidInterval(const std::string& what) : ValidationError(what) {}
};

struct EmptyTrainingSet : ValidationError {
  EmptyTrainingSet() : ValidationError("training set is empty") {}
};

struct SingleClass : ValidationError {
  SingleClass() : ValidationError("training set contains fewer than two classes") {}
};

struct TooFewSamples : ValidationError {
  explicit TooFewSamples(const std::string& what) : ValidationError(what) {}
};

struct ShapeMismatch : ValidationError {
  explicit ShapeMismatch(const std::string& what) : ValidationError(what) {}
};

struct LengthMismatch : ValidationError {
  explicit LengthMismatch(const std::string& what) : ValidationError(what) {}
};

struct NoOmega : ValidationError {
  NoOmega() : ValidationError("model mode does not learn a task-relatedness matrix") {}
};

struct UnrealizableTemplate : ValidationError {
  explicit UnrealizableTemplate(const std::string& what) : ValidationError(what) {}
};

// Numerical failure inside a solver (divergence, bad conditioning).
struct NonFiniteEncountered : Error {
  explicit NonFiniteEncountered(const std::string& what) : Error(what) {}
};

// Malformed input file; carries the 1-based line number.
struct ParseError : Error {
  ParseError(const std::string& what, long line)
      : Error("line " + std::to_string(line) + ": " + what), line_number(line) {}
  long line_number;
};

}  // namespace tpmtl
