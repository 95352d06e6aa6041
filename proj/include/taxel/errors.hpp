#pragma once

#include <stdexcept>
#include <string>

namespace taxel {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A physical precondition is violated (plates touching, overlap vanishing, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Input lies outside a fitted envelope (stress-strain range, shear range).
class OutOfRangeError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration, scenario or data file.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Fit could not be carried out on the supplied data.
class DegenerateDataError : public Error {
public:
    using Error::Error;
};

/// Converter input at or above full scale.
class SaturationError : public Error {
public:
    using Error::Error;
};

/// Every channel stayed inside the classifier dead-band.
class InconclusiveError : public Error {
public:
    using Error::Error;
};

/// Frame protocol line could not be parsed.
class FrameParseError : public Error {
public:
    FrameParseError(std::size_t line, std::string field, const std::string& detail)
        : Error("line " + std::to_string(line) + ": bad " + field + " field: " + detail),
          line_(line),
          field_(std::move(field)) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

}  // namespace taxel
