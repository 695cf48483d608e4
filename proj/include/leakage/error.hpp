#pragma once

#include <stdexcept>
#include <string>

namespace leakage {

/// Base for errors raised by the library on well-typed but unusable input.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or incomplete data: CSV parse failures, missing cells, unknown levels.
class DataError : public Error {
 public:
  using Error::Error;
};

/// The model cannot be fitted or evaluated: rank deficiency, n <= p, degenerate predictive.
class ModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace leakage
