#pragma once

#include "tclfp/deadband.hpp"
#include "tclfp/field.hpp"
#include "tclfp/population.hpp"

#include <functional>
#include <span>
#include <vector>

namespace tclfp {

/// Drift coefficient as a function of the normalized coordinate, 1/h.
using DriftFn = std::function<double(double)>;

/// The hatted (normalized) coefficients of the coupled Fokker-Planck system
///
///   w_t = (beta_hat w_z - (alpha_hat_on  - 2 u_hat) w)_z + delta_hat
///   v_t = (beta_hat v_z - (alpha_hat_off - 2 u_hat) v)_z - delta_hat
///
/// with boundary fluxes beta_hat w_z - (alpha_hat_on - 2 u_hat) w equal to
/// sigma_upper_hat at z = 1 and sigma_lower_hat at z = 0, and the negated
/// values for v.
struct NormalizedSystem {
    double beta_hat = 0.0;            ///< beta / width^2, 1/h
    DriftFn alpha_hat_on;             ///< alpha_1 / width
    DriftFn alpha_hat_off;            ///< alpha_0 / width
    double u_hat = 0.0;               ///< u / width, 1/h
    double sigma_upper_hat = 0.0;     ///< sigma_upper / width
    double sigma_lower_hat = 0.0;     ///< sigma_lower / width
    std::vector<double> delta_hat{};  ///< per-cell OFF->ON source; empty means zero
};

/// First-order thermal drift of a representative load:
/// alpha_j(x) = (x_e - x - s_j R P) / (R C).
struct ThermalDrift {
    double resistance = 2.0;
    double capacitance = 10.0;
    double power = 14.0;
    double ambient = 30.0;

    [[nodiscard]] double alpha(Mode mode, double temp) const noexcept
    {
        return (ambient - temp - to_int(mode) * resistance * power) / (resistance * capacitance);
    }

    /// alpha_hat_j(z) = ((z_e - z) width - s_j R P) / (R C width), z_e = (x_e - lower) / width.
    [[nodiscard]] double alpha_hat(Mode mode, double z, const Deadband& band) const noexcept
    {
        const double z_e = normalize(ambient, band);
        return ((z_e - z) * band.width() - to_int(mode) * resistance * power) /
               (resistance * capacitance * band.width());
    }
};

/// Builds the normalized system for a band position, band velocity `u`
/// (degC/h) and physical boundary fluxes `sigma_*` (loads/h).
[[nodiscard]] NormalizedSystem make_normalized_system(const ThermalDrift& drift, const Deadband& band,
                                                      double beta, double u, double sigma_upper = 0.0,
                                                      double sigma_lower = 0.0);

/// Largest stable explicit step: 0.5 * min over faces of
/// dz^2 / (2 beta_hat + |alpha_hat - 2 u_hat| dz). Throws InvalidScenario when
/// both diffusion and advection vanish.
[[nodiscard]] double admissible_dt(const DistributionField& field, const NormalizedSystem& sys);

/// One explicit conservative finite-volume step (central diffusion, upwind
/// advection, boundary faces carrying exactly the prescribed fluxes).
[[nodiscard]] DistributionField fpe_step(const DistributionField& field, const NormalizedSystem& sys, double dt);

/// Rate model for the in-band switching source: delta_hat = rate * (v - w).
[[nodiscard]] std::vector<double> delta_model(const DistributionField& field, double rate);

/// Physical boundary fluxes.
struct BoundaryFluxes {
    double upper = 0.0;
    double lower = 0.0;
};

/// Thermostat closure for the normalized boundary fluxes: ON mass advected
/// out through z = 0 re-enters as OFF there, and OFF mass advected out
/// through z = 1 re-enters as ON. Returned values are hatted (per unit z).
[[nodiscard]] BoundaryFluxes thermostat_boundary_flux(const DistributionField& field,
                                                      const NormalizedSystem& sys) noexcept;

}  // namespace tclfp
