#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace repliscope {

/// Base for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller-supplied value violates an operation's precondition.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A numerical procedure has no well-defined answer for the given data
/// (zero log-sum, zero variance of the response, and so on).
class DegenerateData : public Error {
public:
    using Error::Error;
};

/// Non-fatal diagnostics accumulated by an operation.
using Warnings = std::vector<std::string>;

}  // namespace repliscope
