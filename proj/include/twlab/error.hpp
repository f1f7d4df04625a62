#pragma once

#include <stdexcept>
#include <string>

namespace twlab {

/// Bad input: parameters out of range, malformed config, mismatched grids.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure failed to deliver (Newton divergence, blow-up, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes a one-line warning to std::clog unless warnings are silenced.
void warn(const std::string& message);
void set_warnings_enabled(bool enabled);

}  // namespace twlab
