#pragma once

#include <stdexcept>
#include <string>

namespace mfbm {

// Argument outside the mathematical domain of an operation, or an invalid
// configuration. Maps to CLI exit code 1.
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical procedure failed (divergent integral, non-PD matrix, ...).
// Maps to CLI exit code 2.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Every perturbed horizon tried by the solver was ill-conditioned.
class ExceptionalHorizonError : public NumericError {
 public:
  explicit ExceptionalHorizonError(const std::string& what) : NumericError(what) {}
};

}  // namespace mfbm
