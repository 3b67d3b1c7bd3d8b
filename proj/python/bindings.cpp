#include "tclfp/output.hpp"
#include "tclfp/population.hpp"
#include "tclfp/runner.hpp"
#include "tclfp/scenario.hpp"
#include "tclfp/trajectory.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <optional>

namespace py = pybind11;
using namespace tclfp;

namespace {

ScenarioConfig config_from(const std::string& json_text)
{
    ScenarioConfig cfg = scenario_from_json(nlohmann::json::parse(json_text.empty() ? "{}" : json_text));
    cfg.validate();
    return cfg;
}

py::dict log_to_dict(const RunLog& log)
{
    py::dict out;
    for (const auto& c : log.columns()) {
        py::array_t<double> column(static_cast<py::ssize_t>(c.values.size()));
        std::copy(c.values.begin(), c.values.end(), column.mutable_data());
        out[py::str(c.name)] = column;
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Aggregate power tracking of thermostatically controlled load populations";

    py::register_exception<Error>(m, "TclfpError");

    m.def("default_scenario", [] { return scenario_to_json(default_scenario()).dump(); },
          "Benchmark scenario as a JSON string");

    m.def(
        "run",
        [](const std::string& scenario, const std::string& mode, std::optional<std::uint64_t> seed,
           std::optional<double> horizon) {
            ScenarioConfig cfg = config_from(scenario);
            if (!mode.empty()) {
                cfg.mode = parse_mode(mode);
            }
            if (seed) {
                cfg.seed = *seed;
            }
            if (horizon) {
                cfg.horizon = *horizon;
            }
            cfg.validate();
            RunLog log;
            {
                py::gil_scoped_release release;
                log = run_scenario(cfg);
            }
            return log_to_dict(log);
        },
        py::arg("scenario") = "", py::arg("mode") = "", py::arg("seed") = py::none(),
        py::arg("horizon") = py::none(), "Run a scenario (JSON text) and return its log columns as arrays");

    m.def(
        "check",
        [](const std::string& run_csv, const std::string& scenario) {
            const ScenarioConfig cfg = config_from(scenario);
            const auto result = check_run(read_csv(run_csv, cfg.mode), cfg);
            return result.report.dump();
        },
        py::arg("run_csv"), py::arg("scenario") = "", "Diagnostics report (JSON text) for a logged run");

    m.def(
        "switch_logic",
        [](double temp, bool on, bool forced, double center, double width) {
            return switch_logic(temp, on ? Mode::on : Mode::off, forced, Deadband::centered(center, width)) ==
                   Mode::on;
        },
        py::arg("temp"), py::arg("on"), py::arg("forced"), py::arg("center") = 20.0, py::arg("width") = 0.5,
        "Next ON state of a load");

    m.def(
        "smoothstep",
        [](double tau) {
            const auto s = smoothstep(tau, kTransitionCoefficients);
            return py::make_tuple(s.s, s.ds, s.d2s, s.d3s);
        },
        py::arg("tau"), "Transition polynomial and its first three derivatives");
}
