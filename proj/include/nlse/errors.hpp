#pragma once

#include <stdexcept>
#include <string>

namespace nlse {

// Bad user-facing configuration (grid, solver, perturbation or config text).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A caller broke a precondition of an API (mismatched grids, out-of-range
// arguments). Distinct from ConfigError so callers can tell bugs from input.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace nlse
