#pragma once

#include <stdexcept>
#include <string>

namespace torsion {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands live in algebras of different dimension.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Malformed or out-of-domain input (bad tensor file, t <= 0, unknown geometry, ...).
class InputError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure could not certify its requested tolerance.
class ToleranceFailure : public Error {
public:
    ToleranceFailure(std::string check, const std::string& what)
        : Error(check + ": " + what), check_(std::move(check)) {}

    const std::string& check() const noexcept { return check_; }

private:
    std::string check_;
};

} // namespace torsion
