#pragma once

#include <stdexcept>
#include <string>

namespace mis {

/// Malformed arguments: dimension mismatch, index out of range, empty subset,
/// sequences that violate their sampling mode.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The query has no closed-form answer for this object.
class UnsupportedQuery : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace mis
