#pragma once

#include <stdexcept>
#include <string>

namespace soq {

/// Input outside an operation's mathematical domain (violated precondition,
/// malformed object, unsupported parameters).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Negative mathematical verdict: the requested square root provably does
/// not exist.
class NoSquareRoot : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Negative mathematical verdict: no witness with the requested shape.
class WitnessNotFound : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Enumeration exceeded the configured element budget or a hard size guard.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A state the underlying theory rules out; always a library bug.
class InternalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace soq
