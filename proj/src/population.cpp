#include "tclfp/population.hpp"

#include "tclfp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tclfp {

void TclParameters::validate() const
{
    auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
    if (!positive(resistance) || !positive(capacitance) || !positive(power) || !positive(efficiency)) {
        throw InvalidScenario("TCL parameters R, C, P, eta must be positive and finite");
    }
}

TclAgent step_tcl(const TclAgent& agent, double ambient, double dt, std::optional<ThermalNoise> noise)
{
    if (!(dt > 0.0)) {
        throw InvalidScenario("step_tcl: dt must be positive");
    }
    const auto& p = agent.params;
    const double steady = ambient - to_int(agent.mode) * p.resistance * p.power;
    const double decay = std::exp(-dt / p.time_constant());

    TclAgent next = agent;
    next.temp = steady + (agent.temp - steady) * decay;
    if (noise && noise->beta > 0.0) {
        next.temp += std::sqrt(2.0 * noise->beta * dt) * noise->standard_normal;
    }
    if (!std::isfinite(next.temp)) {
        throw NumericFailure("step_tcl: temperature became non-finite");
    }
    return next;
}

Mode switch_logic(double temp, Mode previous, bool forced, const Deadband& band) noexcept
{
    if (temp >= band.upper()) {
        return Mode::on;
    }
    if (temp <= band.lower()) {
        return Mode::off;
    }
    const unsigned s = to_int(previous);
    const unsigned r = forced ? 1U : 0U;
    const unsigned sum = ((s & r) + (s | r)) & 1U;  // one-bit add, overflow dropped
    return sum != 0U ? Mode::on : Mode::off;
}

namespace {

double draw_capacitance(const HeterogeneitySpec& spec, const CounterRng& rng, std::uint64_t index)
{
    if (spec.law == CapacitanceLaw::lognormal) {
        const double cv = spec.capacitance_std / spec.capacitance_mean;
        const double sigma2 = std::log1p(cv * cv);
        const double mu = std::log(spec.capacitance_mean) - 0.5 * sigma2;
        return std::exp(mu + std::sqrt(sigma2) * rng.normal(index, 0));
    }
    // Truncated normal: resample non-positive draws.
    for (std::uint64_t attempt = 0;; ++attempt) {
        const double c = spec.capacitance_mean + spec.capacitance_std * rng.normal(index, attempt);
        if (c > 0.0) {
            return c;
        }
    }
}

}  // namespace

std::vector<TclAgent> build_population(std::size_t n, const HeterogeneitySpec& spec, const Deadband& band,
                                       std::uint64_t seed)
{
    if (n == 0) {
        throw InvalidScenario("build_population: population size must be at least 1");
    }
    if (!(spec.capacitance_mean > 0.0) || !(spec.capacitance_std >= 0.0)) {
        throw InvalidScenario("build_population: capacitance mean must be positive, std non-negative");
    }

    const CounterRng cap_rng(seed, static_cast<std::uint64_t>(RngStream::capacitance));
    const CounterRng temp_rng(seed, static_cast<std::uint64_t>(RngStream::initial_temperature));
    const CounterRng mode_rng(seed, static_cast<std::uint64_t>(RngStream::initial_mode));

    std::vector<TclAgent> agents(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& a = agents[i];
        a.params.resistance = spec.resistance;
        a.params.power = spec.power;
        a.params.efficiency = spec.efficiency;
        a.params.capacitance = draw_capacitance(spec, cap_rng, i);
        a.params.validate();
        a.temp = band.lower() + band.width() * temp_rng.uniform(i, 0);
        a.mode = mode_rng.uniform(i, 0) < 0.5 ? Mode::on : Mode::off;
    }
    return agents;
}

DistributionField estimate_distribution(std::span<const TclAgent> agents, const Deadband& band,
                                        std::size_t n_bins, double time)
{
    if (n_bins < 4) {
        throw InvalidScenario("estimate_distribution: need at least 4 bins");
    }
    std::vector<double> on(n_bins, 0.0);
    std::vector<double> off(n_bins, 0.0);
    const double nb = static_cast<double>(n_bins);
    for (const auto& a : agents) {
        const double z = normalize(a.temp, band);
        const double cell = std::clamp(std::floor(z * nb), 0.0, nb - 1.0);
        auto& target = a.mode == Mode::on ? on : off;
        target[static_cast<std::size_t>(cell)] += 1.0;
    }
    // count / (dz * width) -> loads per degC
    const double scale = nb / band.width();
    for (std::size_t i = 0; i < n_bins; ++i) {
        on[i] *= scale;
        off[i] *= scale;
    }
    return {std::move(on), std::move(off), time};
}

double aggregate_power(std::span<const TclAgent> agents) noexcept
{
    double on = 0.0;
    double total = 0.0;
    for (const auto& a : agents) {
        const double p = a.params.electrical_power();
        total += p;
        if (a.mode == Mode::on) {
            on += p;
        }
    }
    return total > 0.0 ? on / total : 0.0;
}

void step_population(std::span<TclAgent> agents, const PopulationStep& step)
{
    const CounterRng noise_rng(step.seed, static_cast<std::uint64_t>(RngStream::thermal_noise));
    const CounterRng switch_rng(step.seed, static_cast<std::uint64_t>(RngStream::forced_switch));
    const double p_forced = step.forced_rate > 0.0 ? -std::expm1(-step.forced_rate * step.dt) : 0.0;

    for (std::size_t i = 0; i < agents.size(); ++i) {
        std::optional<ThermalNoise> noise;
        if (step.noise_beta > 0.0) {
            noise = ThermalNoise{step.noise_beta, noise_rng.normal(i, step.step_index)};
        }
        TclAgent next = step_tcl(agents[i], step.ambient, step.dt, noise);
        const bool forced = p_forced > 0.0 && switch_rng.uniform(i, step.step_index) < p_forced;
        next.mode = switch_logic(next.temp, next.mode, forced, step.band);
        agents[i] = next;
    }
}

double max_step_drift(std::span<const TclAgent> agents, double ambient, double dt) noexcept
{
    double worst = 0.0;
    for (const auto& a : agents) {
        const double tau = a.params.time_constant();
        const double off_rate = std::abs(ambient - a.temp) / tau;
        const double on_rate = std::abs(ambient - a.temp - a.params.resistance * a.params.power) / tau;
        worst = std::max({worst, off_rate, on_rate});
    }
    return worst * dt;
}

double band_excursion(std::span<const TclAgent> agents, const Deadband& band) noexcept
{
    double worst = 0.0;
    for (const auto& a : agents) {
        worst = std::max(worst, band.excursion(a.temp));
    }
    return worst;
}

}  // namespace tclfp
