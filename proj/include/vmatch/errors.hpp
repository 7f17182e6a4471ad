#pragma once

#include <stdexcept>
#include <string>

namespace vmatch {

// Bad inputs: missing files, malformed frames, invalid parameters.
// The CLI maps these to exit code 1.
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Broken internal invariants. The CLI maps these to exit code 2.
class internal_error : public std::logic_error {
public:
    explicit internal_error(const std::string& msg) : std::logic_error(msg) {}
};

} // namespace vmatch
