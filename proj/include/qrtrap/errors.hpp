#pragma once

#include <stdexcept>
#include <string>

namespace qrtrap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// A state cannot be represented on the requested grid.
class ResolutionError : public Error {
public:
    using Error::Error;
};

class SingularSystem : public Error {
public:
    using Error::Error;
};

/// Amplitudes became NaN or infinite.
class NumericalBlowup : public Error {
public:
    NumericalBlowup(const std::string& what, double tau) : Error(what), tau_(tau) {}
    double tau() const noexcept { return tau_; }

private:
    double tau_;
};

class AccuracyError : public Error {
public:
    using Error::Error;
};

class BracketError : public Error {
public:
    using Error::Error;
};

/// Sweep plans, run configs and data files that fail validation.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A sweep plan that cannot be run as given.
class PlanError : public Error {
public:
    using Error::Error;
};

class LookupError : public Error {
public:
    using Error::Error;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw InvalidParameter(message);
}

}  // namespace qrtrap
