#pragma once

#include <stdexcept>
#include <string>

namespace heave {

// Error taxonomy mirrors the CLI exit codes: validation -> 2,
// numerical -> 3, io -> 4.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
    virtual int exit_code() const { return 1; }
};

class ValidationError : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 2; }
};

class NumericalError : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 3; }
};

class IoError : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 4; }
};

}  // namespace heave
