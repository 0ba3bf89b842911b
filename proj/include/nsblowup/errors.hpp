#pragma once

#include <stdexcept>
#include <string>

namespace nsblowup {

/// Thrown when an operation is called outside its documented domain
/// (negative diffusion time, zero scale factor, invalid index, ...).
class contract_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an iterative numerical routine runs out of its evaluation
/// budget before meeting the requested tolerance.
class budget_exhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw contract_error(message);
}

}  // namespace nsblowup
