#pragma once

#include <stdexcept>
#include <string>

namespace secd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file (JSON, CSV, MPS).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Input that parses but violates a documented invariant.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace secd
