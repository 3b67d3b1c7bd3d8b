#pragma once

#include "tclfp/deadband.hpp"
#include "tclfp/field.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace tclfp {

/// Per-load thermal parameters of the first-order (ETP) model.
struct TclParameters {
    double resistance = 2.0;    ///< R, degC/kW
    double capacitance = 10.0;  ///< C, kWh/degC
    double power = 14.0;        ///< P, kW
    double efficiency = 2.5;    ///< eta

    [[nodiscard]] double time_constant() const noexcept { return resistance * capacitance; }
    /// Electrical power drawn while ON, P / eta.
    [[nodiscard]] double electrical_power() const noexcept { return power / efficiency; }

    /// Throws InvalidScenario unless every parameter is positive and finite.
    void validate() const;
};

enum class Mode : std::uint8_t { off = 0, on = 1 };

[[nodiscard]] constexpr int to_int(Mode m) noexcept { return static_cast<int>(m); }

struct TclAgent {
    double temp = 0.0;
    Mode mode = Mode::off;
    TclParameters params{};
};

/// Additive diffusion applied after the deterministic update: the increment
/// is sqrt(2 * beta * dt) * standard_normal.
struct ThermalNoise {
    double beta = 0.0;
    double standard_normal = 0.0;
};

/// Advances one load over `dt` hours with the exact exponential solution of
/// dx/dt = (x_e - x - s R P) / (R C); the mode is held fixed.
[[nodiscard]] TclAgent step_tcl(const TclAgent& agent, double ambient, double dt,
                                std::optional<ThermalNoise> noise = std::nullopt);

/// Thermostat rule with forced switching. Inside the band a forced switch
/// toggles the mode (one-bit (s AND r) + (s OR r) with overflow == s XOR r).
[[nodiscard]] Mode switch_logic(double temp, Mode previous, bool forced, const Deadband& band) noexcept;

enum class CapacitanceLaw { lognormal, normal };

/// Population heterogeneity: only the capacitance varies across loads.
struct HeterogeneitySpec {
    double resistance = 2.0;
    double power = 14.0;
    double efficiency = 2.5;
    double capacitance_mean = 10.0;
    double capacitance_std = 3.0;
    CapacitanceLaw law = CapacitanceLaw::lognormal;
};

/// Builds `n` loads with temperatures uniform over `band` and modes drawn
/// Bernoulli(1/2). Deterministic in `seed`.
[[nodiscard]] std::vector<TclAgent> build_population(std::size_t n, const HeterogeneitySpec& spec,
                                                     const Deadband& band, std::uint64_t seed);

/// Histogram of ON and OFF loads over the band in loads/degC on `n_bins`
/// cells of the normalized grid. Loads outside the band fall into the
/// nearest end cell.
[[nodiscard]] DistributionField estimate_distribution(std::span<const TclAgent> agents,
                                                      const Deadband& band, std::size_t n_bins,
                                                      double time = 0.0);

/// ON electrical power divided by the population's maximal electrical power.
[[nodiscard]] double aggregate_power(std::span<const TclAgent> agents) noexcept;

/// Inputs for advancing a whole population by one step.
struct PopulationStep {
    double ambient = 30.0;
    double dt = 1.0 / 360.0;
    Deadband band = Deadband::centered(20.0, 0.5);
    double noise_beta = 0.0;   ///< 0 disables thermal noise
    double forced_rate = 0.0;  ///< Poisson rate of forced toggles, 1/h
    std::uint64_t seed = 0;
    std::uint64_t step_index = 0;
};

/// Operator-split step: drift, then noise, then boundary/forced switching.
/// Each agent draws from its own counter-based stream keyed by
/// (seed, agent index, step index), so the result does not depend on the
/// order in which agents are processed.
void step_population(std::span<TclAgent> agents, const PopulationStep& step);

/// Largest deterministic temperature change any agent can undergo in `dt`
/// from its current temperature, over both modes.
[[nodiscard]] double max_step_drift(std::span<const TclAgent> agents, double ambient, double dt) noexcept;

/// Largest distance of any agent outside `band` (0 if all inside).
[[nodiscard]] double band_excursion(std::span<const TclAgent> agents, const Deadband& band) noexcept;

}  // namespace tclfp
