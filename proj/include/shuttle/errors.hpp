#pragma once

#include <stdexcept>

namespace shuttle {

// A step is too long for the local tunneling rates.
class StepSizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonFiniteStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace shuttle
