#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace speedup {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Out-of-range or non-finite numeric parameters, malformed configuration.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// An operator in a solution could not be applied.
class ReplayError : public Error {
 public:
  ReplayError(std::size_t step, const std::string& what)
      : Error("replay failed at step " + std::to_string(step) + ": " + what), step_(step) {}

  /// Zero-based index of the step that failed.
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// The teacher behind an oracle produced an invalid solution.
class OracleIntegrityError : public Error {
 public:
  using Error::Error;
};

/// A learner's postcondition (consistency with its sample) did not hold.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class GrammarError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& what)
      : Error("parse error at token " + std::to_string(position) + ": " + what), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Two distinct derivations were found; the grammar is not unambiguous.
class AmbiguityError : public Error {
 public:
  using Error::Error;
};

class IncompatibleTreesError : public Error {
 public:
  using Error::Error;
};

class EnumerationLimitError : public Error {
 public:
  using Error::Error;
};

class InapplicableOperatorError : public Error {
 public:
  using Error::Error;
};

class LocationError : public Error {
 public:
  using Error::Error;
};

/// A solution is not a composition of macros over the given ordering.
class MalformedSolutionError : public Error {
 public:
  using Error::Error;
};

class TableCorruptionError : public Error {
 public:
  using Error::Error;
};

class MoveError : public Error {
 public:
  using Error::Error;
};

}  // namespace speedup
