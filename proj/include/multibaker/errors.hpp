// Copyright 2026 The multibaker Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace multibaker {

/// Cell dimension D is non-positive, or odd where an even one is required.
struct InvalidDimension : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// D1 outside [1, D-1].
struct InvalidAsymmetry : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Number of momentum states in a mixture outside [1, D].
struct InvalidWidth : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Generic out-of-range scalar parameter (s, q, p, sample counts, ...).
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Input object violates its invariants (non-density matrix, wrong size).
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Requested computation exceeds a hard resource budget.
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Eigen-solver failure or a post-condition check that did not hold.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace multibaker
