#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tsnet {

// Base for all library errors. Messages are single-line and self-contained
// so the CLI can relay them verbatim.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Operand dimensions do not conform (matmul, model/structure shapes, ...).
class ShapeError : public Error {
public:
    using Error::Error;
};

// A value violates a precondition: bad label, level out of range, invalid rank.
class ValueError : public Error {
public:
    using Error::Error;
};

// Invalid or inconsistent configuration, including protocol violations.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Malformed input text (CSV cell, config line, checkpoint field).
class ParseError : public Error {
public:
    using Error::Error;
};

// Linear system is singular; callers are told to regularize.
class SingularError : public Error {
public:
    using Error::Error;
};

// Training objective left the finite range; carries the epoch it happened in.
class DivergenceError : public Error {
public:
    DivergenceError(std::size_t epoch, const std::string& message)
        : Error(message), epoch_(epoch) {}

    std::size_t epoch() const { return epoch_; }

private:
    std::size_t epoch_;
};

}  // namespace tsnet
