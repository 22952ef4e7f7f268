#pragma once

#include <stdexcept>
#include <string>

namespace lsa {

/// Base of every exception the core throws. The C API maps each subclass to
/// one status code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller-supplied value is out of its domain.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Configuration document failed to parse or validate.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// The integrator produced a non-finite state or a run cannot be analysed
/// (for example a laser that never lases when an energy ratio is requested).
class NumericalError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace lsa
