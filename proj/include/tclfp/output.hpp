#pragma once

#include "tclfp/runner.hpp"
#include "tclfp/scenario.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace tclfp {

/// Writes the log as CSV: a header of "name [unit]" fields, then one row
/// per sample. Numbers use the shortest round-trip representation, so the
/// bytes are a pure function of the log. Throws IoError.
void emit_csv(const RunLog& log, const std::filesystem::path& path);

/// Reads a file written by emit_csv. Throws IoError on malformed input.
[[nodiscard]] RunLog read_csv(const std::filesystem::path& path, RunMode mode);

/// Writes ambient.dat, references.dat, power.dat and (when agents were
/// simulated) agent_temps.dat into `dir`, plus a gnuplot script plot.gp.
/// Returns the paths written. Throws IoError.
std::vector<std::filesystem::path> emit_plotdata(const RunLog& log, const std::filesystem::path& dir);

/// Post-hoc diagnostics on a logged run.
struct CheckResult {
    nlohmann::json report;
    std::vector<std::string> failed;  ///< names of failing invariants, in check order

    [[nodiscard]] bool pass() const noexcept { return failed.empty(); }
};

/// Checks time monotonicity and finiteness, and depending on the columns
/// present: mass conservation, L1 bounds, the regulation-error bound and
/// closed form, and the agents' deadband excursion.
[[nodiscard]] CheckResult check_run(const RunLog& log, const ScenarioConfig& cfg,
                                    double conservation_tolerance = 1e-10);

}  // namespace tclfp
