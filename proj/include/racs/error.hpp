#ifndef RACS_ERROR_HPP
#define RACS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace racs {

// Input is too large for an exponential-time path (subset tables, n! orders).
class SizeLimitError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Arguments outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A big-integer quantity exceeded the fixed-width range used downstream.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

// Malformed or out-of-range user input (game files, probability strings).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace racs

#endif  // RACS_ERROR_HPP
