#pragma once

#include <stdexcept>
#include <string>

namespace dnet {

// Invalid input or a request the library refuses (bad file, guard violation,
// degenerate basis). The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Internal numerical inconsistency, e.g. a strongly negative radicand in the
// inversion formula. The CLI maps these to exit code 2.
class NumericalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace dnet
