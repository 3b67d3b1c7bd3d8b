#pragma once

#include "tclfp/error.hpp"
#include "tclfp/scenario.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tclfp {

struct LogColumn {
    std::string name;
    std::string unit;
    std::vector<double> values;
};

/// Uniformly sampled time series of one run. The column set depends on the
/// mode: aggregate-model columns appear when a PDE is solved, agent columns
/// when agents are simulated.
class RunLog {
public:
    RunLog() = default;
    explicit RunLog(RunMode mode) : mode_(mode) {}

    [[nodiscard]] RunMode mode() const noexcept { return mode_; }

    std::size_t add_column(std::string name, std::string unit);
    void push_row(std::span<const double> row);

    [[nodiscard]] std::size_t n_rows() const noexcept { return columns_.empty() ? 0 : columns_[0].values.size(); }
    [[nodiscard]] const std::vector<LogColumn>& columns() const noexcept { return columns_; }
    [[nodiscard]] bool has(const std::string& name) const noexcept;
    /// Throws RangeError when the column is absent.
    [[nodiscard]] std::span<const double> column(const std::string& name) const;

    /// Temperatures of a fixed random subset of agents, one row per sample time.
    std::vector<std::size_t> sampled_agents;
    std::vector<double> sample_times;
    std::vector<std::vector<double>> agent_temps;

private:
    RunMode mode_ = RunMode::coupled;
    std::vector<LogColumn> columns_;
};

/// A run stopped on an error; the rows logged so far are kept.
class RunAborted : public Error {
public:
    RunAborted(const std::string& what, RunLog partial) : Error(what), log(std::move(partial)) {}

    RunLog log;
};

/// Runs the closed (or open) loop for the configured mode. One row is
/// logged per control period. Throws RunAborted carrying the partial log
/// when a component fails mid-run.
[[nodiscard]] RunLog run_scenario(const ScenarioConfig& cfg);

/// Open-loop power the population needs to hold the set-point trajectory:
/// mean over loads of clamp((x_e - x_p - R C x_p') / (R P), 0, 1), weighted
/// by electrical power.
[[nodiscard]] double power_reference(std::span<const TclAgent> agents, double ambient, double x_p,
                                     double x_p_rate) noexcept;

}  // namespace tclfp
