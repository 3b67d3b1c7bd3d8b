#pragma once

#include <stdexcept>
#include <string>

namespace tclfp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A state variable became NaN or infinite.
class NumericFailure : public Error {
public:
    using Error::Error;
};

/// Scenario or population parameters are outside their admissible ranges.
class InvalidScenario : public Error {
public:
    using Error::Error;
};

/// The requested time step exceeds the explicit-scheme stability bound.
class StepSizeError : public Error {
public:
    StepSizeError(const std::string& what, double admissible)
        : Error(what), admissible_dt(admissible) {}

    double admissible_dt;
};

/// A density dropped below zero by more than round-off.
class PositivityViolation : public Error {
public:
    using Error::Error;
};

/// The ON-state mass is too small for the feedback law to be evaluated.
class ControlSingularity : public Error {
public:
    using Error::Error;
};

/// A time argument lies outside the horizon of a schedule or table.
class RangeError : public Error {
public:
    using Error::Error;
};

/// A set-point schedule breaks its smoothness or ordering requirements.
class ScheduleInvalid : public Error {
public:
    ScheduleInvalid(const std::string& what, std::size_t segment)
        : Error(what), segment_index(segment) {}

    std::size_t segment_index;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace tclfp
