#pragma once

#include <stdexcept>
#include <string>

namespace gyrocal {

// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// The assembled design matrix is rank deficient or too ill-conditioned to solve.
class SingularDesignError : public Error {
 public:
  explicit SingularDesignError(const std::string& msg) : Error(msg) {}
};

// A solver ran out of its iteration budget before meeting its tolerance.
class NonConvergenceError : public Error {
 public:
  explicit NonConvergenceError(const std::string& msg) : Error(msg) {}
};

// An estimate left the physically meaningful region (e.g. non-positive
// squared gains). Usually means the data are too noisy to identify the model.
class UnphysicalEstimateError : public Error {
 public:
  explicit UnphysicalEstimateError(const std::string& msg) : Error(msg) {}
};

// A raw log could not be split into the expected rotation segments.
class SegmentationError : public Error {
 public:
  explicit SegmentationError(const std::string& msg) : Error(msg) {}
};

// Malformed input file or configuration.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

}  // namespace gyrocal
