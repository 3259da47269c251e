#pragma once

#include <stdexcept>
#include <string>

namespace acx {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Operand shapes do not agree.
class DimensionError : public Error {
public:
    using Error::Error;
};

// A mask puts weight on a pair that is not an edge of the graph, or is malformed.
class MaskError : public Error {
public:
    using Error::Error;
};

// An edge list refers to an edge the graph does not have.
class ValidityError : public Error {
public:
    using Error::Error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

class DataError : public Error {
public:
    using Error::Error;
};

// Input text could not be parsed; the message carries file and line.
class ParseError : public Error {
public:
    using Error::Error;
};

// Persisted model or artifact is truncated or corrupt.
class FormatError : public Error {
public:
    using Error::Error;
};

class VersionError : public FormatError {
public:
    using FormatError::FormatError;
};

// NaN/Inf appeared, or training diverged.
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace acx
