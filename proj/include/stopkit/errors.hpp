#pragma once

#include <stdexcept>

namespace stopkit {

// Base class for every error the library throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input violates a documented precondition or invariant.
struct ValidationError : Error {
  using Error::Error;
};

// A configured size or state cap would be exceeded.
struct LimitError : Error {
  using Error::Error;
};

// Pipeline stages called out of order or on unsuitable input.
struct PipelineError : Error {
  using Error::Error;
};

// Malformed instance or report files.
struct ParseError : Error {
  using Error::Error;
};

}  // namespace stopkit
