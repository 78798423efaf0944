// Error types shared across the library.
//
// Two broad categories map onto the CLI exit codes: invalid input
// (ValidationError, exit 1) and numerical failure (NumericError, exit 2).
// Each carries a short machine-readable code alongside the message.
#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace coxspec {

class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// Bad or inconsistent input data (model files, grids, options).
class ValidationError : public Error {
public:
    using Error::Error;
};

// A numerical procedure could not produce a trustworthy result
// (degenerate elimination, unconverged roots, singular matrices, ...).
class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace coxspec
