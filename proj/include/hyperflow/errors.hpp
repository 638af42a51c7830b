#pragma once

#include <stdexcept>

namespace hyperflow {

// Input document cannot be read (bad JSON, wrong shapes, missing fields).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Document parses but does not describe a valid glued complex.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Arguments outside the mathematical domain (non-positive radius, size
// mismatch, c outside (0, M), ...).
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A quantity that is positive/bounded by theorem came out otherwise.
// Indicates a bug or a numeric blow-up; computation is aborted rather than
// continued with garbage.
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace hyperflow
