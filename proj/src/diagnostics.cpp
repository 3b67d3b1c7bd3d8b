#include "tclfp/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace tclfp {

ConservationLedger ConservationLedger::start(const DistributionField& field, double width) noexcept
{
    ConservationLedger ledger;
    ledger.initial_on = loads_from_integral(field.integral_on(), width);
    ledger.initial_off = loads_from_integral(field.integral_off(), width);
    return ledger;
}

void ConservationLedger::record(double dt, std::span<const double> delta_hat, double dz, double width,
                                double sigma_upper, double sigma_lower) noexcept
{
    double net = 0.0;
    double gross = 0.0;
    for (double d : delta_hat) {
        net += d;
        gross += std::abs(d);
    }
    cum_delta += dt * net * dz * width;
    cum_abs_delta += dt * gross * dz * width;
    cum_sigma_upper += dt * sigma_upper;
    cum_sigma_lower += dt * sigma_lower;
    cum_abs_sigma_upper += dt * std::abs(sigma_upper);
    cum_abs_sigma_lower += dt * std::abs(sigma_lower);
}

bool ConservationReport::pass(double tolerance) const noexcept
{
    return std::abs(residual_on) <= tolerance && std::abs(residual_off) <= tolerance &&
           std::abs(residual_total) <= tolerance;
}

ConservationReport check_conservation(const ConservationLedger& ledger, double loads_on, double loads_off) noexcept
{
    const double n0 = ledger.initial_total();
    const double scale = n0 != 0.0 ? n0 : 1.0;
    ConservationReport r;
    r.residual_on = (loads_on - ledger.expected_on()) / scale;
    r.residual_off = (loads_off - ledger.expected_off()) / scale;
    r.residual_total = (loads_on + loads_off - n0) / scale;
    return r;
}

ConservationReport check_conservation(const ConservationLedger& ledger, const DistributionField& field,
                                      double width) noexcept
{
    return check_conservation(ledger, loads_from_integral(field.integral_on(), width),
                              loads_from_integral(field.integral_off(), width));
}

double l1_norm(std::span<const double> density, double width) noexcept
{
    if (density.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (double x : density) {
        sum += std::abs(x);
    }
    return sum * width / static_cast<double>(density.size());
}

L1Report l1_bounds(std::span<const L1Sample> history, double m_delta, double m_sigma, double tolerance)
{
    L1Report r;
    r.m_delta = m_delta;
    r.m_sigma = m_sigma;
    if (history.empty()) {
        return r;
    }
    r.initial_on = history.front().l1_on;
    r.initial_off = history.front().l1_off;
    r.bound_on = r.initial_on + 2.0 * m_delta + 2.0 * m_sigma;
    r.bound_off = r.initial_off + 2.0 * m_delta + 2.0 * m_sigma;
    const double slack = tolerance * std::max(1.0, r.initial_on + r.initial_off);
    for (const auto& s : history) {
        r.max_on = std::max(r.max_on, s.l1_on);
        r.max_off = std::max(r.max_off, s.l1_off);
        if (s.l1_on > r.bound_on + slack || s.l1_off > r.bound_off + slack) {
            ++r.violations;
        }
    }
    r.pass = r.violations == 0;
    return r;
}

L1Report l1_bounds(std::span<const DistributionField> history, double width, double m_delta, double m_sigma,
                   double tolerance)
{
    std::vector<L1Sample> samples;
    samples.reserve(history.size());
    for (const auto& f : history) {
        samples.push_back({f.time(), l1_norm(f.w(), width), l1_norm(f.v(), width)});
    }
    return l1_bounds(samples, m_delta, m_sigma, tolerance);
}

double compute_gamma(const DistributionField& field, const Deadband& band, OutputWeighting weighting, double power,
                     double efficiency, std::span<const double> delta_hat, double sigma_upper,
                     double sigma_lower) noexcept
{
    const double a = weighting.a;
    const double b = weighting.b;
    double source = 0.0;
    if (!delta_hat.empty()) {
        const double dx = band.width() * field.dz();
        for (std::size_t i = 0; i < delta_hat.size(); ++i) {
            const double x = denormalize(field.cell_center(i), band);
            source += (a * x + b) * delta_hat[i] * dx;
        }
    }
    return power / efficiency *
           ((a * band.upper() + b) * sigma_upper - (a * band.lower() + b) * sigma_lower + source);
}

ErrorBoundReport verify_error_bound(std::span<const double> time, std::span<const double> error,
                                    std::span<const double> gamma, double k0, double bound_tolerance,
                                    double closed_form_tolerance)
{
    ErrorBoundReport r;
    const std::size_t n = std::min({time.size(), error.size(), gamma.size()});
    if (n == 0) {
        return r;
    }
    for (std::size_t i = 0; i < n; ++i) {
        r.gamma_inf = std::max(r.gamma_inf, std::abs(gamma[i]));
    }
    const double t0 = time[0];
    const double e0 = error[0];
    r.max_excess = -std::numeric_limits<double>::infinity();
    double closed = e0;
    double sup_diff = 0.0;
    double sup_ref = std::abs(e0);
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            const double h = time[i] - time[i - 1];
            const double decay = std::exp(-k0 * h);
            const double i0 = -std::expm1(-k0 * h) / k0;
            const double i1 = h / k0 - i0 / k0;
            const double slope = h > 0.0 ? (gamma[i] - gamma[i - 1]) / h : 0.0;
            closed = closed * decay + gamma[i - 1] * i0 + slope * i1;
        }
        const double decay_t = std::exp(-k0 * (time[i] - t0));
        const double bound = std::abs(e0) * decay_t + r.gamma_inf / k0 * (1.0 - decay_t);
        const double excess = std::abs(error[i]) - bound;
        r.max_excess = std::max(r.max_excess, excess);
        if (excess > bound_tolerance) {
            ++r.violations;
        }
        sup_diff = std::max(sup_diff, std::abs(error[i] - closed));
        sup_ref = std::max(sup_ref, std::abs(closed));
    }
    r.closed_form_error = sup_ref > 0.0 ? sup_diff / sup_ref : sup_diff;
    r.bound_pass = r.violations == 0;
    r.closed_form_pass = r.closed_form_error <= closed_form_tolerance;
    return r;
}

nlohmann::json to_json(const ConservationReport& r)
{
    return {{"residual_on", r.residual_on}, {"residual_off", r.residual_off}, {"residual_total", r.residual_total}};
}

nlohmann::json to_json(const L1Report& r)
{
    return {{"initial_on", r.initial_on}, {"initial_off", r.initial_off}, {"M", r.m_delta},
            {"M_prime", r.m_sigma},      {"bound_on", r.bound_on},       {"bound_off", r.bound_off},
            {"max_on", r.max_on},        {"max_off", r.max_off},         {"violations", r.violations},
            {"pass", r.pass}};
}

nlohmann::json to_json(const ErrorBoundReport& r)
{
    return {{"gamma_inf", r.gamma_inf},
            {"max_excess", r.max_excess},
            {"violations", r.violations},
            {"closed_form_rel_error", r.closed_form_error},
            {"bound_pass", r.bound_pass},
            {"closed_form_pass", r.closed_form_pass}};
}

}  // namespace tclfp
