#pragma once

#include <stdexcept>
#include <string>

namespace matta {

// Operand shapes disagree (names both shapes in the message).
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A documented precondition was violated by the caller.
struct ContractError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Non-finite values, failed convergence and similar numerical breakdowns.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A metric is not defined for the given input (e.g. AUROC with one class).
struct MetricError : std::domain_error {
  using std::domain_error::domain_error;
};

}  // namespace matta
