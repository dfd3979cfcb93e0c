#pragma once

#include <stdexcept>
#include <string>

namespace rooflinebench {

// User-facing failures (bad input, bad configuration, missing capability)
// derive from Error. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A configuration value is missing or out of range. Names the field.
class ConfigError : public Error {
public:
    using Error::Error;
};

// An argument lies outside the domain of the operation (e.g. N = 0 for decode).
class DomainError : public Error {
public:
    using Error::Error;
};

// A hardware profile lacks the requested peak or bandwidth for a basis.
class CapabilityError : public Error {
public:
    using Error::Error;
};

// A JSON/CSV document does not follow its schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

// A run record cannot be joined with an architecture.
class JoinError : public Error {
public:
    using Error::Error;
};

// A chart cannot be rendered from its specification.
class RenderError : public Error {
public:
    using Error::Error;
};

// Probing could not run (lock held, bad config, allocation impossible).
class ProbeError : public Error {
public:
    using Error::Error;
};

// Internal invariant violated. Not a user error; the CLI exits with 2.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace rooflinebench
