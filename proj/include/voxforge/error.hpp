// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace voxforge {

// Base of every error thrown by the library. The CLI maps the subclasses
// onto process exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unreadable, missing, or malformed files.
class IoError : public Error {
public:
    using Error::Error;
};

// Inputs that are well-formed but outside an operation's domain
// (empty category, degenerate bounding box, undefined metric, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Incompatible tensor shapes or grid frames.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Bad configuration values or command usage.
class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace voxforge
