#pragma once

#include <stdexcept>
#include <string>

namespace loopsec {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (non-positive bandwidth, zero distance, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Legitimate and eavesdropping gains of one link are exactly equal, so the
/// channel case is undefined.
class DegenerateChannel : public Error {
public:
    using Error::Error;
};

/// No allocation satisfies the constraints (e.g. the leakage budget is too
/// small for any transmission inside the control period).
class Infeasible : public Error {
public:
    using Error::Error;
};

/// An iterative solver hit its iteration cap before reaching its tolerance.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, double gap) : Error(what), gap_(gap) {}
    [[nodiscard]] double gap() const noexcept { return gap_; }

private:
    double gap_;
};

/// A runtime self-check on problem structure failed (monotonicity, bracketing).
class InternalError : public Error {
public:
    using Error::Error;
};

/// Malformed scenario / spec file or unknown key.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace loopsec
