#pragma once

#include <stdexcept>
#include <string>

namespace echoaug {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input violates a documented contract (bad dimensions, unknown preset,
/// out-of-range value, malformed CSV/JSON content).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Filesystem or codec failure.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace echoaug
