#pragma once

#include <stdexcept>
#include <string>

namespace osmeval {

/// Base class for all errors raised by the harness.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filesystem / stream failures (missing file, short read, unwritable path).
class IoError : public Error {
public:
    using Error::Error;
};

/// Syntactically malformed input (bad JSON, bad PLY header, bad number).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Well-formed input that violates a documented schema or invariant.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Unsupported variant of an otherwise known format (e.g. big-endian PLY).
class FormatError : public Error {
public:
    using Error::Error;
};

/// Caller broke a precondition of an operation.
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// A metric has no defined value for the given inputs (0/0 style cases).
class UndefinedMetricError : public Error {
public:
    using Error::Error;
};

/// Bad or inconsistent run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Dataset content cannot be ingested (empty keyframe directory, ...).
class IngestError : public Error {
public:
    using Error::Error;
};

}  // namespace osmeval
