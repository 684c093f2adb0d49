#pragma once

#include <stdexcept>

namespace bridgecast {

// Malformed or unusable input: files, CSV cells, checkpoint headers.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numeric contract violation: non-finite values where finite ones are
// guaranteed, or a radicand pushed negative beyond tolerance.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reverse-step solve requested at a step whose forward noise scale is zero;
// the caller must special-case such steps.
class DegenerateStepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A verification check did not hold.
class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bridgecast
