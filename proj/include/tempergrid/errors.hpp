#pragma once

#include <stdexcept>
#include <string>

namespace tempergrid {

// Bad user input: malformed files, invalid parameters, inconsistent configs.
// The CLI maps this to exit code 2.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Refusal of a request that would exceed a hard resource guard
// (e.g. exact enumeration beyond the spin limit). CLI exit code 3.
struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace tempergrid
