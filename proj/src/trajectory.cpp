#include "tclfp/trajectory.hpp"

#include "tclfp/error.hpp"

#include <cmath>
#include <sstream>

namespace tclfp {

SmoothstepValue smoothstep(double tau, const std::array<double, 5>& a) noexcept
{
    // s = sum_l a_l tau^(l+5); derivatives term by term.
    SmoothstepValue out;
    for (std::size_t l = 0; l < a.size(); ++l) {
        const double p = static_cast<double>(l + 5);
        out.s += a[l] * std::pow(tau, p);
        out.ds += a[l] * p * std::pow(tau, p - 1.0);
        out.d2s += a[l] * p * (p - 1.0) * std::pow(tau, p - 2.0);
        out.d3s += a[l] * p * (p - 1.0) * (p - 2.0) * std::pow(tau, p - 3.0);
    }
    return out;
}

SetpointSchedule::SetpointSchedule(double initial, std::vector<Transition> transitions, double horizon,
                                   std::array<double, 5> coefficients)
    : initial_(initial), transitions_(std::move(transitions)), horizon_(horizon), coefficients_(coefficients)
{
    if (!std::isfinite(initial_) || !(horizon_ > 0.0)) {
        throw ScheduleInvalid("schedule needs a finite initial level and a positive horizon", 0);
    }
    double previous_end = 0.0;
    for (std::size_t i = 0; i < transitions_.size(); ++i) {
        const auto& tr = transitions_[i];
        if (!(tr.t_end > tr.t_start) || !std::isfinite(tr.target)) {
            throw ScheduleInvalid("transition " + std::to_string(i) + " needs t_end > t_start", i);
        }
        if (tr.t_start < previous_end || tr.t_start < 0.0) {
            throw ScheduleInvalid("transition " + std::to_string(i) + " overlaps its predecessor", i);
        }
        previous_end = tr.t_end;
    }
}

double SetpointSchedule::level_before(std::size_t i) const noexcept
{
    return i == 0 ? initial_ : transitions_[i - 1].target;
}

TrajectoryPoint eval_trajectory(const SetpointSchedule& schedule, double t)
{
    if (!(t >= 0.0) || t > schedule.horizon()) {
        std::ostringstream msg;
        msg << "eval_trajectory: t=" << t << " h outside [0, " << schedule.horizon() << "]";
        throw RangeError(msg.str());
    }
    const auto& transitions = schedule.transitions();
    double level = schedule.initial();
    for (std::size_t i = 0; i < transitions.size(); ++i) {
        const auto& tr = transitions[i];
        if (t < tr.t_start) {
            break;
        }
        if (t <= tr.t_end) {
            const double from = schedule.level_before(i);
            const double amplitude = tr.target - from;
            const double duration = tr.t_end - tr.t_start;
            const auto s = smoothstep((t - tr.t_start) / duration, schedule.coefficients());
            return {from + amplitude * s.s, amplitude * s.ds / duration,
                    amplitude * s.d2s / (duration * duration),
                    amplitude * s.d3s / (duration * duration * duration)};
        }
        level = tr.target;
    }
    return {level, 0.0, 0.0, 0.0};
}

EndpointReport verify_endpoint_conditions(const SetpointSchedule& schedule, double tolerance)
{
    EndpointReport report;
    const auto& transitions = schedule.transitions();
    for (std::size_t i = 0; i < transitions.size(); ++i) {
        EndpointCheck check;
        check.segment = i;
        const double amplitude = transitions[i].target - schedule.level_before(i);
        if (amplitude != 0.0) {
            const auto s0 = smoothstep(0.0, schedule.coefficients());
            const auto s1 = smoothstep(1.0, schedule.coefficients());
            check.start = {std::abs(s0.ds), std::abs(s0.d2s), std::abs(s0.d3s)};
            check.end = {std::abs(s1.ds), std::abs(s1.d2s), std::abs(s1.d3s)};
            check.end_value_error = std::abs(s1.s - 1.0);
        }
        for (int k = 0; k < 3; ++k) {
            check.pass = check.pass && check.start[k] <= tolerance && check.end[k] <= tolerance;
        }
        check.pass = check.pass && check.end_value_error <= tolerance;
        report.pass = report.pass && check.pass;
        report.segments.push_back(check);
        if (!check.pass) {
            throw ScheduleInvalid("transition " + std::to_string(i) + " violates the rest-to-rest endpoint conditions",
                                  i);
        }
    }
    return report;
}

}  // namespace tclfp
