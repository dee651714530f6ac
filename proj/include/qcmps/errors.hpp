#pragma once

#include <stdexcept>
#include <string>

namespace qcmps {

// Thrown when a dense-simulation size guard is exceeded.
class GuardExceeded : public std::runtime_error {
 public:
  explicit GuardExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file or config.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Factorization failure, non-finite values, solver breakdown.
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qcmps
