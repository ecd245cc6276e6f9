#pragma once

#include <stdexcept>
#include <string>

namespace lowrank {

// Caller handed us something outside a documented precondition.
struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A matrix required to be PSD (up to tolerance) is not.
struct NotPsd : InvalidInput {
    using InvalidInput::InvalidInput;
};

// Prox step size incompatible with the penalty parameters.
struct InvalidStep : InvalidInput {
    using InvalidInput::InvalidInput;
};

// An iterative numerical routine failed to converge within its budget.
struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace lowrank
