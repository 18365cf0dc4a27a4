#pragma once

#include <stdexcept>
#include <string>

namespace lexent {

// Bad files, malformed manifests, unusable documents. CLI maps these to exit 1.
struct input_error : std::runtime_error {
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Violated numeric preconditions or failed computations. CLI maps these to exit 2.
struct compute_error : std::runtime_error {
    explicit compute_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace lexent
