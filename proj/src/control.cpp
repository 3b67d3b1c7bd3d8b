#include "tclfp/control.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numeric>
#include <sstream>

namespace tclfp {

double weighted_output(const DistributionField& field, const Deadband& band, OutputWeighting weighting, double power,
                       double efficiency) noexcept
{
    const auto w = field.w();
    const double dx = band.width() * field.dz();
    double sum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double x = denormalize(field.cell_center(i), band);
        sum += (weighting.a * x + weighting.b) * w[i];
    }
    return power / efficiency * sum * dx;
}

double weighted_output(std::span<const TclAgent> agents, OutputWeighting weighting) noexcept
{
    double sum = 0.0;
    for (const auto& agent : agents) {
        if (agent.mode == Mode::on) {
            sum += agent.params.electrical_power() * (weighting.a * agent.temp + weighting.b);
        }
    }
    return sum;
}

double compute_control(const DistributionField& field, const Deadband& band, const ControlInputs& in)
{
    const auto w = field.w();
    const double dx = band.width() * field.dz();
    const double a = in.weighting.a;

    double on_loads = 0.0;
    double drift_moment = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double x = denormalize(field.cell_center(i), band);
        on_loads += w[i] * dx;
        drift_moment += (in.drift.alpha(Mode::on, x) + in.b_rate / a) * w[i] * dx;
    }
    if (!(std::abs(on_loads) >= in.denom_floor)) {
        std::ostringstream msg;
        msg << "compute_control: ON mass " << on_loads << " below floor " << in.denom_floor;
        throw ControlSingularity(msg.str());
    }
    const auto edge = field.boundary_on();
    const double numerator = in.beta * (edge.upper - edge.lower) - drift_moment +
                             in.efficiency / (a * in.drift.power) * in.phi;
    return -numerator / on_loads;
}

double compute_control_grid(const DistributionField& field, const Deadband& band, const ControlInputs& in)
{
    const auto w = field.w();
    const std::size_t n = w.size();
    const double dz = field.dz();
    const double width = band.width();
    const double a = in.weighting.a;

    double mass = 0.0;
    for (double x : w) {
        mass += x * dz;
    }
    if (!(std::abs(mass * width) >= in.denom_floor)) {
        std::ostringstream msg;
        msg << "compute_control_grid: ON mass " << mass * width << " below floor " << in.denom_floor;
        throw ControlSingularity(msg.str());
    }

    // dy/dt = K [ a u (I - 2U) + b' I - a width beta_hat (w_{n-1} - w_0) + a width sum alpha_hat_k up_k dz ]
    // with K = width P / eta, I = sum w dz and U = sum over interior faces of the upwind value times dz.
    const double k = width * in.drift.power / in.efficiency;
    const double beta_hat = in.beta / (width * width);
    std::vector<double> alpha_face(n + 1);
    for (std::size_t f = 1; f < n; ++f) {
        alpha_face[f] = in.drift.alpha_hat(Mode::on, static_cast<double>(f) * dz, band);
    }
    const double diffusion = -a * width * beta_hat * (w[n - 1] - w[0]);

    double u = compute_control(field, band, in);
    for (int iter = 0; iter < 8; ++iter) {
        const double u_hat = u / width;
        double upwind_mass = 0.0;
        double advection = 0.0;
        for (std::size_t f = 1; f < n; ++f) {
            const double c = alpha_face[f] - 2.0 * u_hat;
            const double up = c > 0.0 ? w[f - 1] : w[f];
            upwind_mass += up * dz;
            advection += alpha_face[f] * up * dz;
        }
        const double coeff = a * (mass - 2.0 * upwind_mass);
        if (coeff == 0.0) {
            throw ControlSingularity("compute_control_grid: degenerate input gain");
        }
        const double next = (in.phi / k - in.b_rate * mass - diffusion - a * width * advection) / coeff;
        if (next == u) {
            break;
        }
        u = next;
    }
    return u;
}

ErrorClosedForm error_closed_form(double e0, double k0, const std::function<double(double)>& gamma, double t,
                                  double gamma_inf)
{
    if (!(k0 > 0.0)) {
        throw InvalidScenario("error_closed_form: k0 must be positive");
    }
    const double decay = std::exp(-k0 * t);
    double convolution = 0.0;
    if (t > 0.0) {
        auto integrand = [&](double s) { return gamma(s) * std::exp(-k0 * (t - s)); };
        convolution = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, t, 15, 1e-12);
    }
    return {e0 * decay + convolution, std::abs(e0) * decay + gamma_inf / k0 * (1.0 - decay)};
}

void ControllerConfig::validate() const
{
    if (a == 0.0 || !std::isfinite(a)) {
        throw InvalidScenario("controller: weighting slope a must be non-zero");
    }
    if (!(k0 > 0.0)) {
        throw InvalidScenario("controller: gain k0 must be positive");
    }
    if (smoothing_window < 1) {
        throw InvalidScenario("controller: smoothing window must be at least 1");
    }
    if (!(denom_floor > 0.0)) {
        throw InvalidScenario("controller: denominator floor must be positive");
    }
}

double smooth_control(ControllerState& state, double u_raw, std::size_t window)
{
    state.u_history.push_back(u_raw);
    while (state.u_history.size() > window) {
        state.u_history.pop_front();
    }
    return std::accumulate(state.u_history.begin(), state.u_history.end(), 0.0) /
           static_cast<double>(state.u_history.size());
}

ControllerState advance_reference(ControllerState state, double u_applied, double dt)
{
    if (!(dt > 0.0)) {
        throw InvalidScenario("advance_reference: dt must be positive");
    }
    const double previous = state.last_u.value_or(u_applied);
    state.x_ref += 0.5 * (previous + u_applied) * dt;
    state.last_u = u_applied;
    return state;
}

}  // namespace tclfp
