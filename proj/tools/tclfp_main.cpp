// tclfp: run, check and demo the TCL population tracking simulator.
#include "tclfp/output.hpp"
#include "tclfp/runner.hpp"
#include "tclfp/scenario.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace tclfp;

namespace {

enum ExitCode { ok = 0, usage = 1, run_failed = 2, invariant_failed = 3, io_failed = 4 };

fs::path output_dir(const std::string& flag)
{
    if (!flag.empty()) {
        return flag;
    }
    if (const char* env = std::getenv("TCLFP_OUT"); env != nullptr && *env != '\0') {
        return env;
    }
    return "tclfp_out";
}

void write_json(const fs::path& path, const nlohmann::json& j)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << j.dump(2) << '\n';
}

int report_check(const CheckResult& check, const fs::path& dir)
{
    write_json(dir / "report.json", check.report);
    for (const auto& inv : check.report["invariants"]) {
        std::cout << (inv["pass"].get<bool>() ? "PASS " : "FAIL ") << inv["name"].get<std::string>() << '\n';
    }
    if (!check.pass()) {
        std::cerr << "invariant failed: " << check.failed.front() << '\n';
        return invariant_failed;
    }
    return ok;
}

int execute(ScenarioConfig cfg, const fs::path& dir)
{
    fs::create_directories(dir);
    write_json(dir / "scenario.json", scenario_to_json(cfg));
    const auto start = std::chrono::steady_clock::now();
    RunLog log;
    try {
        log = run_scenario(cfg);
    } catch (const RunAborted& aborted) {
        emit_csv(aborted.log, dir / "run.csv");
        write_json(dir / "report.json", {{"pass", false},
                                         {"failed", {"run_completed"}},
                                         {"error", aborted.what()},
                                         {"rows", aborted.log.n_rows()},
                                         {"invariants", {{{"name", "run_completed"}, {"pass", false}}}}});
        std::cerr << "run failed: " << aborted.what() << "\n(partial log in " << (dir / "run.csv").string()
                  << ")\ninvariant failed: run_completed\n";
        return run_failed;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    emit_csv(log, dir / "run.csv");
    emit_plotdata(log, dir / "plot");
    std::cout << "mode " << to_string(cfg.mode) << ", " << log.n_rows() << " rows in " << seconds << " s -> "
              << dir.string() << '\n';
    return report_check(check_run(log, cfg), dir);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Aggregate power tracking of thermostatically controlled load populations"};
    app.require_subcommand(1);

    std::string config_path;
    std::string mode;
    std::optional<std::uint64_t> seed;
    std::optional<double> horizon;
    std::string out;

    auto* run = app.add_subcommand("run", "Run a scenario and write run.csv, plot data and report.json");
    run->add_option("--config", config_path, "Scenario JSON file (defaults to the benchmark)")
        ->check(CLI::ExistingFile);
    run->add_option("--mode", mode, "agents, pde or coupled")
        ->check(CLI::IsMember({"agents", "pde", "coupled"}));
    run->add_option("--seed", seed, "Random seed");
    run->add_option("--horizon", horizon, "Override the horizon (h)");
    run->add_option("--out", out, "Output directory (default: $TCLFP_OUT or ./tclfp_out)");

    std::string check_dir;
    auto* check = app.add_subcommand("check", "Run the diagnostics on a logged run");
    check->add_option("dir", check_dir, "Directory holding run.csv and scenario.json")
        ->required()
        ->check(CLI::ExistingDirectory);

    auto* demo = app.add_subcommand("demo", "Run the benchmark scenario (10,000 loads, 24 h)");
    demo->add_option("--seed", seed, "Random seed");
    demo->add_option("--out", out, "Output directory (default: $TCLFP_OUT or ./tclfp_out)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    try {
        if (*run || *demo) {
            ScenarioConfig cfg = config_path.empty() ? default_scenario() : load_scenario(config_path);
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
            return execute(cfg, output_dir(out));
        }
        if (*check) {
            const fs::path dir = check_dir;
            const ScenarioConfig cfg = load_scenario(dir / "scenario.json");
            const RunLog log = read_csv(dir / "run.csv", cfg.mode);
            return report_check(check_run(log, cfg), dir);
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return io_failed;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return io_failed;
    }
    return usage;
}
