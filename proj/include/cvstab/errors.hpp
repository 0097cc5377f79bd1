#pragma once

#include <stdexcept>
#include <string>

namespace cvstab {

// Numerical failure while training a model (singular system, invalid inputs
// discovered mid-fit). Carries enough context to identify the culprit.
class FitError : public std::runtime_error {
public:
    explicit FitError(const std::string& msg) : std::runtime_error(msg) {}
};

// Problem with external data: unreadable file, malformed CSV cell, label set
// that cannot be mapped onto {-1,+1}.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace cvstab
