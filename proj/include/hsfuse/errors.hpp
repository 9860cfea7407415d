#pragma once

#include <stdexcept>
#include <string>

namespace hsfuse {

// Base of every error raised by the library. Callers that only care about
// "something in the pipeline failed" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Malformed container header (bad magic, unknown dtype).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Header and payload disagree, or the file is truncated.
class CorruptionError : public Error {
 public:
  using Error::Error;
};

// Non-finite sample values.
class ValueError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

// The Sylvester system has no unique solution (mu = 0 with singular R^T R).
class IllPosedError : public Error {
 public:
  using Error::Error;
};

// Dense verification solver asked to handle a system above its size cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

class PriorShapeError : public Error {
 public:
  using Error::Error;
};

class DegenerateBandError : public Error {
 public:
  using Error::Error;
};

class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

// Solver failure inside a parameter search, tagged with the mu that failed.
class SolveAtMuError : public Error {
 public:
  SolveAtMuError(double mu, const std::string& what)
      : Error("solve failed at mu=" + std::to_string(mu) + ": " + what), mu_(mu) {}
  double mu() const noexcept { return mu_; }

 private:
  double mu_;
};

}  // namespace hsfuse
