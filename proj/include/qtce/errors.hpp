#pragma once

#include <stdexcept>
#include <string>

namespace qtce {

// Argument outside the domain of a formula.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct DivergenceError : std::domain_error {
  using std::domain_error::domain_error;
};

struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Last stroke does not return to the first state.
struct ClosureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateError : std::domain_error {
  using std::domain_error::domain_error;
};

// Reversible load not positive or a negative correction difference.
struct InvalidEngineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RegimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace qtce
