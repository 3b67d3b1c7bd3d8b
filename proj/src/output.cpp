#include "tclfp/output.hpp"

#include "tclfp/diagnostics.hpp"
#include "tclfp/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace tclfp {

namespace {

void append_number(std::string& out, double value)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    out.append(buf, res.ptr);
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == sep) {
        out.emplace_back();
    }
    return out;
}

}  // namespace

void emit_csv(const RunLog& log, const std::filesystem::path& path)
{
    std::string text;
    const auto& cols = log.columns();
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (c > 0) {
            text += ',';
        }
        text += cols[c].name + " [" + cols[c].unit + "]";
    }
    text += "\r\n";
    for (std::size_t r = 0; r < log.n_rows(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (c > 0) {
                text += ',';
            }
            append_number(text, cols[c].values[r]);
        }
        text += "\r\n";
    }
    write_file(path, text);
}

RunLog read_csv(const std::filesystem::path& path, RunMode mode)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    RunLog log(mode);
    std::string line;
    if (!std::getline(in, line)) {
        throw IoError(path.string() + ": missing header");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    for (const auto& field : split(line, ',')) {
        const auto open = field.find(" [");
        if (open == std::string::npos || field.back() != ']') {
            throw IoError(path.string() + ": header field '" + field + "' lacks a unit");
        }
        log.add_column(field.substr(0, open), field.substr(open + 2, field.size() - open - 3));
    }
    std::vector<double> row(log.columns().size());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != row.size()) {
            throw IoError(path.string() + ": line " + std::to_string(line_no) + " has the wrong field count");
        }
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const auto& f = fields[i];
            const auto res = std::from_chars(f.data(), f.data() + f.size(), row[i]);
            if (res.ec != std::errc{} || res.ptr != f.data() + f.size()) {
                throw IoError(path.string() + ": line " + std::to_string(line_no) + ": bad number '" + f + "'");
            }
        }
        log.push_row(row);
    }
    return log;
}

std::vector<std::filesystem::path> emit_plotdata(const RunLog& log, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    }
    std::vector<std::filesystem::path> written;

    auto table = [&](const std::string& name, const std::vector<std::string>& columns) {
        std::vector<std::span<const double>> data;
        std::string text;
        for (const auto& c : columns) {
            if (log.has(c)) {
                data.push_back(log.column(c));
                text += text.empty() ? c : ' ' + c;
            }
        }
        text += '\n';
        for (std::size_t r = 0; r < log.n_rows(); ++r) {
            for (std::size_t c = 0; c < data.size(); ++c) {
                if (c > 0) {
                    text += ' ';
                }
                append_number(text, data[c][r]);
            }
            text += '\n';
        }
        const auto path = dir / name;
        write_file(path, text);
        written.push_back(path);
    };

    table("ambient.dat", {"t", "x_e"});
    table("references.dat", {"t", "x_p", "x_ref", "band_lower", "u_raw", "u_applied"});
    table("power.dat", {"t", "power", "power_pde", "power_ref"});

    const bool have_temps = !log.agent_temps.empty();
    if (have_temps) {
        std::string text = "t";
        for (std::size_t i : log.sampled_agents) {
            text += " agent_" + std::to_string(i);
        }
        text += '\n';
        for (std::size_t r = 0; r < log.agent_temps.size(); ++r) {
            append_number(text, log.sample_times[r]);
            for (double v : log.agent_temps[r]) {
                text += ' ';
                append_number(text, v);
            }
            text += '\n';
        }
        const auto path = dir / "agent_temps.dat";
        write_file(path, text);
        written.push_back(path);
    }

    std::string script =
        "# gnuplot script for the run's data files\n"
        "set terminal pngcairo size 900,600\n"
        "set xlabel 't [h]'\n"
        "set key autotitle columnhead\n"
        "set output 'ambient.png'\n"
        "set ylabel 'ambient [degC]'\n"
        "plot 'ambient.dat' using 1:2 with lines\n"
        "set output 'references.png'\n"
        "set ylabel 'temperature [degC]'\n"
        "plot 'references.dat' using 1:2 with lines, '' using 1:3 with lines\n"
        "set output 'control.png'\n"
        "set ylabel 'u [degC/h]'\n"
        "plot 'references.dat' using 1:5 with lines, '' using 1:6 with lines\n"
        "set output 'power.png'\n"
        "set ylabel 'normalized power'\n"
        "plot for [i=2:*] 'power.dat' using 1:i with lines\n";
    if (have_temps) {
        script +=
            "set output 'agent_temps.png'\n"
            "set ylabel 'temperature [degC]'\n"
            "plot for [i=2:*] 'agent_temps.dat' using 1:i with lines lw 0.5 notitle\n";
    } else {
        script += "# agent_temps.dat not written: no agents were simulated in this mode\n";
    }
    const auto path = dir / "plot.gp";
    write_file(path, script);
    written.push_back(path);
    return written;
}

CheckResult check_run(const RunLog& log, const ScenarioConfig& cfg, double conservation_tolerance)
{
    CheckResult result;
    auto& report = result.report;
    report["mode"] = to_string(log.mode());
    report["rows"] = log.n_rows();
    nlohmann::json invariants = nlohmann::json::array();
    auto record = [&](const std::string& name, bool pass, nlohmann::json details) {
        details["name"] = name;
        details["pass"] = pass;
        invariants.push_back(std::move(details));
        if (!pass) {
            result.failed.push_back(name);
        }
    };

    const std::size_t n = log.n_rows();
    bool finite = true;
    for (const auto& c : log.columns()) {
        finite = finite && std::all_of(c.values.begin(), c.values.end(), [](double v) { return std::isfinite(v); });
    }
    record("finite_rows", finite, nlohmann::json::object());

    bool monotone = n > 0;
    if (log.has("t")) {
        const auto t = log.column("t");
        for (std::size_t i = 1; i < n; ++i) {
            monotone = monotone && t[i] > t[i - 1];
        }
    } else {
        monotone = false;
    }
    record("monotone_time", monotone, nlohmann::json::object());
    if (!monotone || !finite) {
        report["invariants"] = invariants;
        report["pass"] = false;
        report["failed"] = result.failed;
        return result;
    }

    if (log.has("mass_on")) {
        const auto on = log.column("mass_on");
        const auto off = log.column("mass_off");
        const auto cd = log.column("cum_delta");
        const auto su = log.column("cum_sigma_upper");
        const auto sl = log.column("cum_sigma_lower");
        ConservationLedger ledger;
        ledger.initial_on = on[0];
        ledger.initial_off = off[0];
        ConservationReport worst;
        for (std::size_t i = 0; i < n; ++i) {
            ledger.cum_delta = cd[i];
            ledger.cum_sigma_upper = su[i];
            ledger.cum_sigma_lower = sl[i];
            const auto r = check_conservation(ledger, on[i], off[i]);
            worst.residual_on = std::max(worst.residual_on, std::abs(r.residual_on));
            worst.residual_off = std::max(worst.residual_off, std::abs(r.residual_off));
            worst.residual_total = std::max(worst.residual_total, std::abs(r.residual_total));
        }
        auto details = to_json(worst);
        details["tolerance"] = conservation_tolerance;
        record("conservation", worst.pass(conservation_tolerance), details);

        const auto l1_on = log.column("l1_on");
        const auto l1_off = log.column("l1_off");
        const auto t = log.column("t");
        std::vector<L1Sample> samples(n);
        for (std::size_t i = 0; i < n; ++i) {
            samples[i] = {t[i], l1_on[i], l1_off[i]};
        }
        const double m_delta = log.column("cum_abs_delta")[n - 1];
        const double m_sigma = log.column("cum_abs_sigma_upper")[n - 1] + log.column("cum_abs_sigma_lower")[n - 1];
        const auto l1 = l1_bounds(samples, m_delta, m_sigma);
        record("l1_bounds", l1.pass, to_json(l1));
    }

    if (log.has("gamma") && cfg.control_enabled && log.mode() == RunMode::pde) {
        const auto t = log.column("t");
        const auto e = log.column("e");
        const auto gamma = log.column("gamma");
        double scale = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            scale = std::max({scale, std::abs(e[i]), std::abs(gamma[i]) / cfg.k0});
        }
        const double bound_tol = 1e-6 * scale;
        const auto eb = verify_error_bound(t, e, gamma, cfg.k0, bound_tol);
        auto details = to_json(eb);
        details["bound_tolerance"] = bound_tol;
        record("error_bound", eb.bound_pass, details);
        record("error_closed_form", eb.closed_form_pass, details);
    }

    if (log.has("band_excursion")) {
        const auto exc = log.column("band_excursion");
        const auto bound = log.column("drift_bound");
        std::size_t violations = 0;
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            worst = std::max(worst, exc[i] - bound[i]);
            if (exc[i] > bound[i] + 1e-9) {
                ++violations;
            }
        }
        record("band_excursion", violations == 0, {{"violations", violations}, {"max_excess", worst}});

        const auto count = log.column("n_agents");
        const bool constant = std::all_of(count.begin(), count.end(), [&](double c) { return c == count[0]; });
        record("population_size", constant, {{"n", count[0]}});
    }

    report["invariants"] = invariants;
    report["pass"] = result.failed.empty();
    report["failed"] = result.failed;
    return result;
}

}  // namespace tclfp
