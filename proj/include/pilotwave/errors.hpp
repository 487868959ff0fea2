#pragma once

#include <stdexcept>
#include <string>

namespace pilotwave {

/// Base class for every numeric failure raised by the library.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Propagator requested with t <= t0.
class DegenerateTimeError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Simpson doubling never met the requested tolerance.
class NonConvergenceError : public NumericError {
public:
    NonConvergenceError(const std::string& what, int panels, double last_change)
        : NumericError(what), panels_(panels), last_change_(last_change) {}

    [[nodiscard]] int panels() const { return panels_; }
    [[nodiscard]] double last_change() const { return last_change_; }

private:
    int panels_;
    double last_change_;
};

/// Probability density fell below the guidance floor at a requested point.
class DensityFloorError : public NumericError {
public:
    DensityFloorError(const std::string& what, double position, double time)
        : NumericError(what), position_(position), time_(time) {}

    [[nodiscard]] double position() const { return position_; }
    [[nodiscard]] double time() const { return time_; }

private:
    double position_;
    double time_;
};

/// Trajectory step halving exhausted its budget; carries the last good state.
class StepUnderflowError : public NumericError {
public:
    StepUnderflowError(const std::string& what, double last_time, double last_position)
        : NumericError(what), last_time_(last_time), last_position_(last_position) {}

    [[nodiscard]] double last_time() const { return last_time_; }
    [[nodiscard]] double last_position() const { return last_position_; }

private:
    double last_time_;
    double last_position_;
};

/// Too few samples per bin for a chi-square test.
class InsufficientSampleError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Impact lies where neither spinor component dominates.
class AmbiguousRegionError : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace pilotwave
