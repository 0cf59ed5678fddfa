#pragma once

#include <stdexcept>
#include <string>

namespace abcdq {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or out-of-contract input: bad files, bad dimensions,
/// violated operation preconditions. CLI exit code 2.
class InvalidInput : public Error {
public:
    explicit InvalidInput(const std::string& what) : Error(what) {}
};

/// Segmentation produced nothing usable: no lesion, or a degenerate one
/// covering almost none or almost all of the frame. CLI exit code 3.
class NoLesionFound : public Error {
public:
    explicit NoLesionFound(const std::string& what) : Error(what) {}
};

/// Lesion found but too small for stable feature computation
/// (degenerate hull / too few pixels). Treated as "no scoreable lesion"
/// by the CLI (exit code 3).
class TinyLesion : public NoLesionFound {
public:
    explicit TinyLesion(const std::string& what) : NoLesionFound(what) {}
};

/// Numeric failure inside an otherwise valid computation:
/// divergence, degenerate eigenproblem, non-finite intermediates.
/// CLI exit code 4.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(what) {}
};

} // namespace abcdq
