#pragma once

#include <stdexcept>
#include <string>

namespace rqe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file or record. Carries the offending location when known.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Input that is well-formed but violates a precondition of the operation.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Index built from a different collection or resource set than the one in use.
class StaleIndexError : public Error {
public:
    using Error::Error;
};

}  // namespace rqe
