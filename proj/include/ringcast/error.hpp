// Exception types shared by the ringcast library.

#pragma once

#include <stdexcept>
#include <string>

namespace ringcast {

// Base for every error the library reports. `code()` is a stable
// machine-readable tag (e.g. "TooFewVertices").
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// Malformed or unreadable user input (files, config values).
class InputError : public Error {
public:
    using Error::Error;
};

// Violated internal contract; indicates a bug in the engine.
class LogicError : public Error {
public:
    using Error::Error;
};

} // namespace ringcast
