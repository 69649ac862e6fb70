#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace isospec {

// Caller violated a documented precondition (bad input, non-symmetric
// measure, element of the wrong shape, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Element code does not match the group family it was handed to.
class StructuralError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

// A configured cap (memory, support size, dense-solver size) was hit.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& what, std::size_t reached)
      : std::runtime_error(what), reached_(reached) {}
  // Last fully completed stage (BFS layer, convolution step, ...).
  std::size_t reached() const noexcept { return reached_; }

 private:
  std::size_t reached_;
};

// A mathematical invariant that must hold by construction was violated.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace isospec
