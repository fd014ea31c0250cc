#ifndef WRISTMATCH_ERRORS_HPP
#define WRISTMATCH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace wristmatch {

/// Error taxonomy shared by the library and the CLI. The CLI maps each class
/// to a stable process exit code: usage 2, data/protocol 3, numeric 4.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Caller passed arguments that violate a documented precondition.
class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(what) {}
};

/// Input data is malformed or violates the evaluation protocol
/// (bad manifest, unreadable image, probe identity missing from gallery, ...).
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(what) {}
};

/// A numeric routine failed to produce a usable result
/// (singular transform, degenerate distribution fit, empty segmentation, ...).
class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(what) {}
};

} // namespace wristmatch

#endif
