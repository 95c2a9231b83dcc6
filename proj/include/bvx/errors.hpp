#pragma once

#include <stdexcept>
#include <string>

namespace bvx {

/// Invalid parameters or inputs; the CLI maps this to exit status 2.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A checked inequality or structural invariant failed; exit status 1.
struct ContractViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Linear solver failed to factor or to reach its residual tolerance.
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace bvx
