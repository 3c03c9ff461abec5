#pragma once

#include <stdexcept>
#include <string>

namespace stsr {

// Bad flags, bad config values, contract violations caused by the caller.
// The CLI maps this to exit code 1.
struct usage_error : std::runtime_error {
    explicit usage_error(const std::string &msg) : std::runtime_error(msg) {}
};

// Missing, corrupt or inconsistent input data (files, frames, bundles).
// The CLI maps this to exit code 2.
struct data_error : std::runtime_error {
    explicit data_error(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace stsr
