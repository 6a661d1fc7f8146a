#pragma once

#include <stdexcept>
#include <string>

namespace penkey {

/// Malformed or inconsistent input: bad documents, invalid states, violated
/// preconditions on user data. Maps to CLI exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The request is well formed but exceeds a configured size limit or asks for
/// an unsupported capability (e.g. mixed-state EoF beyond two qubits).
/// Maps to CLI exit code 2.
class LimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace penkey
