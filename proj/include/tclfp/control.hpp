#pragma once

#include "tclfp/deadband.hpp"
#include "tclfp/field.hpp"
#include "tclfp/fpe.hpp"
#include "tclfp/population.hpp"
#include "tclfp/trajectory.hpp"

#include <cstddef>
#include <deque>
#include <functional>
#include <optional>
#include <span>

namespace tclfp {

/// Affine weighting a x + b(t) of the output functional. With b = -a x_p
/// the weighting is a (x - x_p), so x_p acts as the set-point.
struct OutputWeighting {
    double a = -1.0;
    double b = 0.0;

    static OutputWeighting around(double a, double setpoint) noexcept { return {a, -a * setpoint}; }
};

/// y = (P / eta) * integral over the band of (a x + b) w dx, by midpoint
/// quadrature on the field's cells.
[[nodiscard]] double weighted_output(const DistributionField& field, const Deadband& band, OutputWeighting weighting,
                                     double power, double efficiency) noexcept;

/// Exact agent sum over ON loads of (P_i / eta_i) (a x_i + b).
[[nodiscard]] double weighted_output(std::span<const TclAgent> agents, OutputWeighting weighting) noexcept;

/// Everything the feedback law needs besides the measured field.
struct ControlInputs {
    OutputWeighting weighting{};
    double b_rate = 0.0;  ///< db/dt, evaluated analytically from the set-point trajectory
    double phi = 0.0;     ///< auxiliary (stabilizing) input
    double beta = 0.1;    ///< diffusivity, degC^2/h
    ThermalDrift drift{};
    double efficiency = 2.5;
    double denom_floor = 1.0;  ///< minimum ON load count for the law to be defined
};

/// Feedback-linearizing band velocity (degC/h):
///
///   u = -[ beta (w(x_hi) - w(x_lo)) - int (alpha_1 + b'/a) w dx + eta phi / (a P) ] / int w dx
///
/// Boundary values are linear extrapolations of the outermost cells and the
/// integrals use midpoint quadrature. Throws ControlSingularity when
/// |int w dx| < denom_floor.
[[nodiscard]] double compute_control(const DistributionField& field, const Deadband& band, const ControlInputs& in);

/// Same law, but linearizing the finite-volume scheme of fpe_step instead of
/// the continuum equation: uses the cell-face diffusion and upwind advection
/// fluxes, so that on the discrete system dy/dt = phi holds exactly (up to
/// the time integrator) when there are no sources or boundary fluxes. The
/// upwind direction depends on u; it is resolved by a short fixed-point
/// iteration. Same singularity guard as compute_control.
[[nodiscard]] double compute_control_grid(const DistributionField& field, const Deadband& band,
                                          const ControlInputs& in);

/// phi = y_d' - k0 e
[[nodiscard]] constexpr double stabilizer(double error, double y_d_rate, double k0) noexcept
{
    return y_d_rate - k0 * error;
}

struct ErrorClosedForm {
    double error = 0.0;  ///< e0 exp(-k0 t) + int_0^t Gamma(s) exp(-k0 (t - s)) ds
    double bound = 0.0;  ///< |e0| exp(-k0 t) + Gamma_inf / k0 (1 - exp(-k0 t))
};

/// Solution of de/dt = -k0 e + Gamma(t); the convolution is evaluated by
/// adaptive Gauss-Kronrod quadrature.
[[nodiscard]] ErrorClosedForm error_closed_form(double e0, double k0, const std::function<double(double)>& gamma,
                                                double t, double gamma_inf = 0.0);

struct ControllerConfig {
    double a = -1.0;
    double k0 = 7.5;
    SetpointSchedule y_d = SetpointSchedule::constant(0.0);
    SetpointSchedule x_p = SetpointSchedule::constant(20.0);
    std::size_t smoothing_window = 10;
    double denom_floor = 100.0;

    /// Throws InvalidScenario unless a != 0, k0 > 0, window >= 1, floor > 0.
    void validate() const;
};

struct ControllerState {
    double error = 0.0;
    std::deque<double> u_history{};
    double x_ref = 20.0;
    std::optional<double> last_u{};  ///< previous applied value, for trapezoidal accumulation
};

/// Pushes `u_raw` into the window (evicting the oldest beyond `window`) and
/// returns the arithmetic mean of the retained values.
double smooth_control(ControllerState& state, double u_raw, std::size_t window);

/// Integrates x_ref' = u with the trapezoidal rule across successive calls.
[[nodiscard]] ControllerState advance_reference(ControllerState state, double u_applied, double dt);

}  // namespace tclfp
