#pragma once

#include "tclfp/control.hpp"
#include "tclfp/population.hpp"
#include "tclfp/trajectory.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tclfp {

enum class RunMode { agents, pde, coupled };

[[nodiscard]] std::string to_string(RunMode mode);
/// Throws InvalidScenario on an unknown name.
[[nodiscard]] RunMode parse_mode(const std::string& name);

/// Piecewise-linear table of (hour, degC) knots, held constant outside.
class AmbientProfile {
public:
    AmbientProfile() = default;
    explicit AmbientProfile(std::vector<std::pair<double, double>> knots);

    [[nodiscard]] double operator()(double t) const noexcept;
    [[nodiscard]] const std::vector<std::pair<double, double>>& knots() const noexcept { return knots_; }

private:
    std::vector<std::pair<double, double>> knots_{{0.0, 30.0}};
};

/// offset + amplitude * sin(2 pi t / period + phase), loads/h.
struct FluxProfile {
    double offset = 0.0;
    double amplitude = 0.0;
    double period = 1.0;
    double phase = 0.0;

    [[nodiscard]] double operator()(double t) const noexcept;
    /// Largest |value| the profile can take.
    [[nodiscard]] double envelope() const noexcept;
};

enum class SourceModel { none, rate, sine };
enum class BoundaryModel { none, profile, thermostat };

/// In-band switching source and boundary fluxes fed to the aggregate model.
struct DisturbanceConfig {
    /// rate: delta = rho (v - w) with the forced-switching rate.
    /// sine: delta_hat = amplitude sin(2 pi t / period) cos(pi z), mass neutral.
    SourceModel source = SourceModel::rate;
    double sine_amplitude = 0.0;  ///< loads/degC/h
    double sine_period = 0.1;     ///< h
    BoundaryModel boundary = BoundaryModel::none;
    FluxProfile sigma_upper{};
    FluxProfile sigma_lower{};
};

/// How the aggregate model's field is set up at t = 0.
enum class InitialField {
    population,  ///< histogram of the built population
    uniform,     ///< uniform 50/50 field of the population size
    relaxed,     ///< population histogram run open loop (u = 0) under the t = 0 forcing
};

struct SolverConfig {
    std::size_t n_cells = 100;
    std::optional<double> dt{};  ///< fixed PDE step (h); empty selects the stability bound
    InitialField initial = InitialField::population;
    double relax_hours = 4.0;  ///< open-loop pre-run length for InitialField::relaxed
};

struct OutputConfig {
    std::size_t agent_samples = 200;
    std::size_t sample_stride = 6;  ///< record sampled temperatures every this many log rows
};

struct ScenarioConfig {
    RunMode mode = RunMode::coupled;
    std::uint64_t seed = 1;
    double horizon = 24.0;
    std::size_t n_agents = 10000;
    HeterogeneitySpec population{};
    bool agent_noise = false;  ///< add sqrt(2 beta dt) Gaussian increments to agents
    double band_width = 0.5;
    double band_center = 20.0;
    AmbientProfile ambient{};
    double beta = 0.1;
    double forced_rate = 0.5;  ///< 1/h
    DisturbanceConfig disturbance{};
    bool control_enabled = true;
    double a = -1.0;
    double k0 = 7.5;
    std::size_t smoothing_window = 10;
    std::optional<double> denom_floor{};  ///< loads; empty means 1% of the population
    double control_period = 1.0 / 360.0;
    SetpointSchedule y_d = SetpointSchedule::constant(0.0);
    SetpointSchedule x_p = SetpointSchedule::constant(20.0);
    SolverConfig solver{};
    OutputConfig output{};

    [[nodiscard]] double resolved_denom_floor() const noexcept
    {
        return denom_floor.value_or(0.01 * static_cast<double>(n_agents));
    }
    [[nodiscard]] ControllerConfig controller() const;

    /// Throws InvalidScenario naming the first offending field.
    void validate() const;
};

/// Benchmark defaults: Table-1 parameters, a daily ambient swing within
/// [28, 32] degC and a representative set-point schedule.
[[nodiscard]] ScenarioConfig default_scenario();

/// Overlays `j` on the defaults; unknown keys are rejected.
[[nodiscard]] ScenarioConfig scenario_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json scenario_to_json(const ScenarioConfig& cfg);
[[nodiscard]] ScenarioConfig load_scenario(const std::filesystem::path& path);

}  // namespace tclfp
