#include "tclfp/fpe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tclfp {

DistributionField::DistributionField(std::vector<double> on, std::vector<double> off, double time)
    : w_(std::move(on)), v_(std::move(off)), time_(time)
{
    if (w_.size() != v_.size() || w_.empty()) {
        throw InvalidScenario("DistributionField: ON and OFF grids must be non-empty and equal in size");
    }
}

DistributionField DistributionField::zeros(std::size_t n_cells, double time)
{
    return {std::vector<double>(n_cells, 0.0), std::vector<double>(n_cells, 0.0), time};
}

namespace {

double integral(std::span<const double> f, double dz) noexcept
{
    double s = 0.0;
    for (double x : f) {
        s += x;
    }
    return s * dz;
}

BoundaryValues extrapolate(std::span<const double> f) noexcept
{
    const std::size_t n = f.size();
    if (n < 2) {
        return {f[0], f[0]};
    }
    return {1.5 * f[0] - 0.5 * f[1], 1.5 * f[n - 1] - 0.5 * f[n - 2]};
}

}  // namespace

double DistributionField::integral_on() const noexcept { return integral(w_, dz()); }
double DistributionField::integral_off() const noexcept { return integral(v_, dz()); }
BoundaryValues DistributionField::boundary_on() const noexcept { return extrapolate(w_); }
BoundaryValues DistributionField::boundary_off() const noexcept { return extrapolate(v_); }

bool DistributionField::all_finite() const noexcept
{
    auto finite = [](double x) { return std::isfinite(x); };
    return std::all_of(w_.begin(), w_.end(), finite) && std::all_of(v_.begin(), v_.end(), finite);
}

NormalizedSystem make_normalized_system(const ThermalDrift& drift, const Deadband& band, double beta, double u,
                                        double sigma_upper, double sigma_lower)
{
    if (!(beta >= 0.0)) {
        throw InvalidScenario("diffusivity must be non-negative");
    }
    NormalizedSystem sys;
    const double width = band.width();
    sys.beta_hat = beta / (width * width);
    sys.alpha_hat_on = [drift, band](double z) { return drift.alpha_hat(Mode::on, z, band); };
    sys.alpha_hat_off = [drift, band](double z) { return drift.alpha_hat(Mode::off, z, band); };
    sys.u_hat = u / width;
    sys.sigma_upper_hat = sigma_upper / width;
    sys.sigma_lower_hat = sigma_lower / width;
    return sys;
}

double admissible_dt(const DistributionField& field, const NormalizedSystem& sys)
{
    const std::size_t n = field.n_cells();
    const double dz = field.dz();
    double max_speed = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        const double z = static_cast<double>(k) * dz;
        max_speed = std::max({max_speed, std::abs(sys.alpha_hat_on(z) - 2.0 * sys.u_hat),
                              std::abs(sys.alpha_hat_off(z) - 2.0 * sys.u_hat)});
    }
    const double denom = 2.0 * sys.beta_hat + max_speed * dz;
    if (!(denom > 0.0)) {
        throw InvalidScenario("admissible_dt: degenerate system without diffusion or advection");
    }
    return 0.5 * dz * dz / denom;
}

namespace {

// Fills face fluxes J_{k} (k = 0..n, rightward positive) for one species.
void face_fluxes(std::span<const double> f, double beta_hat, const DriftFn& alpha_hat, double u_hat,
                 double flux_left, double flux_right, std::vector<double>& flux)
{
    const std::size_t n = f.size();
    const double dz = 1.0 / static_cast<double>(n);
    flux[0] = flux_left;
    flux[n] = flux_right;
    for (std::size_t k = 1; k < n; ++k) {
        const double c = alpha_hat(static_cast<double>(k) * dz) - 2.0 * u_hat;
        const double upwind = c > 0.0 ? f[k - 1] : f[k];
        flux[k] = -beta_hat * (f[k] - f[k - 1]) / dz + c * upwind;
    }
}

}  // namespace

DistributionField fpe_step(const DistributionField& field, const NormalizedSystem& sys, double dt)
{
    const double limit = admissible_dt(field, sys);
    if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "fpe_step: dt=" << dt << " h violates the stability bound; admissible dt <= " << limit << " h";
        throw StepSizeError(msg.str(), limit);
    }
    const std::size_t n = field.n_cells();
    if (!sys.delta_hat.empty() && sys.delta_hat.size() != n) {
        throw InvalidScenario("fpe_step: delta_hat must have one value per cell");
    }
    const double dz = field.dz();

    std::vector<double> flux_w(n + 1);
    std::vector<double> flux_v(n + 1);
    face_fluxes(field.w(), sys.beta_hat, sys.alpha_hat_on, sys.u_hat, -sys.sigma_lower_hat, -sys.sigma_upper_hat,
                flux_w);
    face_fluxes(field.v(), sys.beta_hat, sys.alpha_hat_off, sys.u_hat, sys.sigma_lower_hat, sys.sigma_upper_hat,
                flux_v);

    DistributionField next = field;
    auto w = next.w();
    auto v = next.v();
    const double ratio = dt / dz;
    double scale = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double source = sys.delta_hat.empty() ? 0.0 : sys.delta_hat[i];
        w[i] -= ratio * (flux_w[i + 1] - flux_w[i]) - dt * source;
        v[i] -= ratio * (flux_v[i + 1] - flux_v[i]) + dt * source;
        scale = std::max({scale, std::abs(w[i]), std::abs(v[i])});
    }
    next.set_time(field.time() + dt);

    if (!next.all_finite()) {
        throw NumericFailure("fpe_step: non-finite density");
    }
    // Round-off threshold relative to the field magnitude.
    const double floor = -1e-12 * scale;
    for (std::size_t i = 0; i < n; ++i) {
        if (w[i] < floor || v[i] < floor) {
            std::ostringstream msg;
            msg << "fpe_step: negative density in cell " << i << " (w=" << w[i] << ", v=" << v[i] << ")";
            throw PositivityViolation(msg.str());
        }
    }
    return next;
}

std::vector<double> delta_model(const DistributionField& field, double rate)
{
    if (!(rate >= 0.0)) {
        throw InvalidScenario("delta_model: switching rate must be non-negative");
    }
    std::vector<double> delta(field.n_cells());
    const auto w = field.w();
    const auto v = field.v();
    for (std::size_t i = 0; i < delta.size(); ++i) {
        delta[i] = rate * (v[i] - w[i]);
    }
    return delta;
}

BoundaryFluxes thermostat_boundary_flux(const DistributionField& field, const NormalizedSystem& sys) noexcept
{
    const std::size_t n = field.n_cells();
    const double c_on_lower = sys.alpha_hat_on(0.0) - 2.0 * sys.u_hat;
    const double c_off_upper = sys.alpha_hat_off(1.0) - 2.0 * sys.u_hat;
    BoundaryFluxes hat;
    // ON outflow at z = 0: J_w(0) = c w_0 < 0, and J_w(0) = -sigma_lower_hat.
    hat.lower = std::max(0.0, -c_on_lower) * field.w()[0];
    // OFF outflow at z = 1: J_v(1) = c v_{n-1} > 0, and J_v(1) = +sigma_upper_hat.
    hat.upper = std::max(0.0, c_off_upper) * field.v()[n - 1];
    return hat;
}

}  // namespace tclfp
