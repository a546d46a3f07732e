#pragma once

#include <stdexcept>
#include <string>

namespace freerg {

// Bad user input / violated precondition. CLI maps this to exit code 2.
struct input_error : std::runtime_error {
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure (non-convergence, branch escape, ...). CLI maps this to exit code 1.
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace freerg
