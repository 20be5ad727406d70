#pragma once

#include <stdexcept>
#include <string>

namespace vpb {

/// Violated precondition or incompatible inputs (config error, exit code 2).
class StructuralError : public std::runtime_error {
 public:
  explicit StructuralError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Solver breakdown: non-convergence, CFL refusal, loss of operator
/// structure (exit code 3).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw StructuralError(msg);
}

inline void require_numeric(bool cond, const std::string& msg) {
  if (!cond) throw NumericalError(msg);
}

}  // namespace vpb
