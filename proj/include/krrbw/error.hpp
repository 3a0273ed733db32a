#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace krrbw {

// Malformed user input (files, flags). The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical procedure could not produce a result for valid input
// (singular systems, degenerate data for a selector). CLI exit code 3.
class ComputeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FactorizationError : public ComputeError {
 public:
  FactorizationError(std::size_t pivot, double value)
      : ComputeError("Cholesky factorization failed: non-positive pivot " +
                     std::to_string(value) + " at index " + std::to_string(pivot)),
        pivot_(pivot) {}
  FactorizationError(std::size_t pivot, const std::string& message)
      : ComputeError(message), pivot_(pivot) {}

  // 1-based index of the offending pivot.
  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

}  // namespace krrbw
