#pragma once

#include <stdexcept>
#include <string>

namespace stirap {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input that a caller could have validated up front.
class InputError : public Error {
public:
    using Error::Error;
};

class DimensionError : public InputError {
public:
    using InputError::InputError;
};

class UnsupportedSchemeError : public InputError {
public:
    using InputError::InputError;
};

/// Two-photon resonance (delta_2 = delta_4 = 0, delta_1 = delta_3) was requested but does not hold.
class ResonanceError : public InputError {
public:
    using InputError::InputError;
};

/// Stokes must strictly precede pump.
class SequenceOrderError : public InputError {
public:
    using InputError::InputError;
};

/// A mixing angle or eigenvector is undefined at the given field values.
class DegenerateInputError : public InputError {
public:
    using InputError::InputError;
};

class ConfigError : public InputError {
public:
    using InputError::InputError;
};

/// Integration accuracy could not be established (step-halving disagreement, step underflow).
class AccuracyError : public Error {
public:
    using Error::Error;
};

/// The time grid does not cover the support of the pulses.
class CoverageError : public Error {
public:
    using Error::Error;
};

/// Medium propagation became unstable or unresolved at some z.
class ResolutionError : public Error {
public:
    ResolutionError(const std::string& what, double z) : Error(what), z_(z) {}
    double z() const noexcept { return z_; }

private:
    double z_;
};

}  // namespace stirap
