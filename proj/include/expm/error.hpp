#pragma once

#include <stdexcept>
#include <string>

namespace expm {

// Root of every error raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Operand shapes do not agree.
class DimensionError : public Error {
public:
    using Error::Error;
};

// A result would contain NaN or Inf.
class NumericalError : public Error {
public:
    using Error::Error;
};

// Argument outside the admissible range (tolerance below roundoff, order too
// large, malformed spec).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// A remainder bound was requested outside the region where it holds.
class DomainError : public Error {
public:
    using Error::Error;
};

// Malformed text input (matrix files, CSV, JSON config).
class ParseError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace expm
