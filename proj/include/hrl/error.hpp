#pragma once

#include <stdexcept>
#include <string>

namespace hrl {

// Non-finite input or an argument outside its mathematical domain.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// A configuration, template or file failed validation.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A caller broke an interface contract (e.g. a policy returned an
// out-of-range action, shapes do not line up).
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

// NaN/Inf appeared in learner parameters or gradients.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// State enumeration exceeded its cap.
struct StateOverflowError : std::overflow_error {
  using std::overflow_error::overflow_error;
};

struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hrl
