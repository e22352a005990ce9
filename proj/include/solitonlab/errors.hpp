#pragma once

#include <stdexcept>
#include <string>

namespace slab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// evolution produced NaN/Inf
struct BlowupError : Error {
    using Error::Error;
};

// conserved-quantity drift exceeded the watchdog
struct AccuracyLossError : Error {
    using Error::Error;
};

// Newton iteration exhausted
struct NoConvergenceError : Error {
    using Error::Error;
};

// fit Jacobian ill-conditioned
struct DegenerateError : Error {
    using Error::Error;
};

// multi-soliton shifts lost their ordering
struct CrossingDetectedError : Error {
    using Error::Error;
};

// complex-soliton shifts too close to the singular set
struct SingularShiftError : Error {
    using Error::Error;
};

// linear-system solvability condition failed
struct InconsistentError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace slab
