#pragma once

#include <stdexcept>
#include <string>

namespace swv {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// -- linear algebra --------------------------------------------------------

struct NotSymmetricError : Error {
    using Error::Error;
};

struct NotSpdError : Error {
    using Error::Error;
};

struct SingularSystemError : Error {
    using Error::Error;
};

struct SingularLyapunovError : Error {
    using Error::Error;
};

struct NoConvergenceError : Error {
    using Error::Error;
};

struct OverflowError : Error {
    using Error::Error;
};

struct DimensionMismatchError : Error {
    using Error::Error;
};

// -- certificates ----------------------------------------------------------

/// Spectral abscissa too close to zero to classify the subsystem.
struct BoundaryError : Error {
    using Error::Error;
};

struct EpsilonSearchError : Error {
    using Error::Error;
};

// -- switching signals -----------------------------------------------------

struct InadmissibleTransitionError : Error {
    InadmissibleTransitionError(std::size_t index, int from, int to)
        : Error("inadmissible transition #" + std::to_string(index) + ": " +
                std::to_string(from) + " -> " + std::to_string(to)),
          index(index), from(from), to(to) {}
    std::size_t index;
    int from;
    int to;
};

struct UnknownModeError : Error {
    using Error::Error;
};

struct NonpositiveTimeError : Error {
    using Error::Error;
};

struct NotEulerianError : Error {
    using Error::Error;
};

struct DeadEndError : Error {
    using Error::Error;
};

// -- margins and simulation ------------------------------------------------

struct MissingEdgeGainError : Error {
    using Error::Error;
};

struct EmptyTailError : Error {
    using Error::Error;
};

struct TooFewSamplesError : Error {
    using Error::Error;
};

struct EnvelopeViolationError : Error {
    EnvelopeViolationError(double t, double v, double bound, bool lower)
        : Error("envelope violation at t=" + std::to_string(t) + ": V=" +
                std::to_string(v) + (lower ? " below lower bound " : " above upper bound ") +
                std::to_string(bound)),
          t(t), value(v), bound(bound), lower(lower) {}
    double t;
    double value;
    double bound;
    bool lower;
};

// -- configuration ---------------------------------------------------------

struct ConfigError : Error {
    using Error::Error;
};

} // namespace swv
