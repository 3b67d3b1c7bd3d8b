#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <vector>

namespace tclfp {

/// Coefficients of the ninth-order transition polynomial
/// s(tau) = tau^5 * sum_l a_l tau^l; they are the unique choice giving
/// s(0) = 0, s(1) = 1 and vanishing first three derivatives at both ends.
inline constexpr std::array<double, 5> kTransitionCoefficients{126.0, -420.0, 540.0, -315.0, 70.0};

/// s(tau) and its first three tau-derivatives.
struct SmoothstepValue {
    double s = 0.0;
    double ds = 0.0;
    double d2s = 0.0;
    double d3s = 0.0;
};

[[nodiscard]] SmoothstepValue smoothstep(double tau, const std::array<double, 5>& coefficients) noexcept;

/// A smooth move from the previously held level to `target` over [t_start, t_end].
struct Transition {
    double t_start = 0.0;
    double t_end = 1.0;
    double target = 0.0;
};

/// Piecewise schedule: constant holds joined by polynomial transitions.
class SetpointSchedule {
public:
    SetpointSchedule() = default;
    /// Throws ScheduleInvalid when transitions overlap, are unordered or
    /// have t_end <= t_start.
    SetpointSchedule(double initial, std::vector<Transition> transitions,
                     double horizon = std::numeric_limits<double>::infinity(),
                     std::array<double, 5> coefficients = kTransitionCoefficients);

    static SetpointSchedule constant(double value,
                                     double horizon = std::numeric_limits<double>::infinity())
    {
        return {value, {}, horizon};
    }

    [[nodiscard]] double initial() const noexcept { return initial_; }
    [[nodiscard]] const std::vector<Transition>& transitions() const noexcept { return transitions_; }
    [[nodiscard]] double horizon() const noexcept { return horizon_; }
    [[nodiscard]] const std::array<double, 5>& coefficients() const noexcept { return coefficients_; }

    /// Level held before transition `i` starts.
    [[nodiscard]] double level_before(std::size_t i) const noexcept;

private:
    double initial_ = 0.0;
    std::vector<Transition> transitions_;
    double horizon_ = std::numeric_limits<double>::infinity();
    std::array<double, 5> coefficients_ = kTransitionCoefficients;
};

struct TrajectoryPoint {
    double value = 0.0;
    double rate = 0.0;   ///< first time derivative
    double accel = 0.0;  ///< second
    double jerk = 0.0;   ///< third
};

/// Evaluates the schedule at `t`; throws RangeError outside [0, horizon].
[[nodiscard]] TrajectoryPoint eval_trajectory(const SetpointSchedule& schedule, double t);

struct EndpointCheck {
    std::size_t segment = 0;
    std::array<double, 3> start{};  ///< |d^k s / dtau^k| at tau = 0, k = 1..3
    std::array<double, 3> end{};    ///< same at tau = 1
    double end_value_error = 0.0;   ///< |s(1) - 1|
    bool pass = true;
};

struct EndpointReport {
    std::vector<EndpointCheck> segments;
    bool pass = true;
};

/// Checks the rest-to-rest conditions of every transition. Derivatives are
/// in units of the segment amplitude (tau-derivatives of s), so the
/// tolerance is scale free. Throws ScheduleInvalid naming the first failing
/// segment; zero-amplitude transitions pass trivially.
EndpointReport verify_endpoint_conditions(const SetpointSchedule& schedule, double tolerance = 1e-10);

}  // namespace tclfp
