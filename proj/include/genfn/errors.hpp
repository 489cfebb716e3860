#pragma once

#include <stdexcept>
#include <string>

namespace genfn {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A representative produced a non-finite value (or was asked for a derivative
/// order beyond what jets carry).
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// Invalid construction parameters (mollifier, grid, Fock spec, ...).
class ConstructionError : public Error {
public:
    using Error::Error;
};

}  // namespace genfn
