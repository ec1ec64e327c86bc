#pragma once

#include <stdexcept>
#include <string>

namespace cactuss {

/// Base for every error raised by the library. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Missing file, unwritable path, short read.
class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed header, JSON or image.
class FormatError : public Error {
public:
    using Error::Error;
};

/// A value violates a type invariant or an operation precondition.
class ValidationError : public Error {
public:
    using Error::Error;
};

}  // namespace cactuss
