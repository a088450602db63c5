#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace newsamp {

// Base class of all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments: dimension mismatches, asymmetric matrices, empty
// sample sets, bad configuration values.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Requested truncation rank outside [1, p] or threshold rank with r+1 > p.
class InvalidRank : public Error {
 public:
  using Error::Error;
};

// Threshold eigenvalue at or below the zero tolerance; inverting it would
// produce an unbounded scaling matrix.
class DegenerateSpectrum : public Error {
 public:
  using Error::Error;
};

// Singular solves, non-finite iterates.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

// Inner product too large for the exponential link.
class EvalOverflow : public Error {
 public:
  EvalOverflow(const std::string& what, std::size_t sample_index)
      : Error(what), sample_index(sample_index) {}
  std::size_t sample_index;
};

// Requested sample size incompatible with the dataset size.
class InvalidSize : public Error {
 public:
  using Error::Error;
};

// Sequential-scheme coefficient bound requested on an unbounded set.
class RequiresBoundedSet : public Error {
 public:
  using Error::Error;
};

// Coefficient formula evaluated where its logarithm degenerates.
class OutOfRegime : public Error {
 public:
  using Error::Error;
};

// Drift bound denominator non-positive: the sample is too small for the
// concentration statement to apply.
class SampleTooSmall : public Error {
 public:
  using Error::Error;
};

// Convergence predicate cannot certify any start radius.
class NoGuarantee : public Error {
 public:
  using Error::Error;
};

// Iteration-count bound preconditions violated.
class NoBound : public Error {
 public:
  using Error::Error;
};

// Not enough trace tail to estimate a rate.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

// Text-format loader failure, carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line(line) {}
  std::size_t line;
};

// Structurally unusable data: empty file, ragged rows.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Bad or incomplete run configuration (CLI layer).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// File system failures (CLI layer).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace newsamp
