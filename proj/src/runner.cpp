#include "tclfp/runner.hpp"

#include "tclfp/diagnostics.hpp"
#include "tclfp/fpe.hpp"
#include "tclfp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>

namespace tclfp {

std::size_t RunLog::add_column(std::string name, std::string unit)
{
    columns_.push_back({std::move(name), std::move(unit), {}});
    return columns_.size() - 1;
}

void RunLog::push_row(std::span<const double> row)
{
    if (row.size() != columns_.size()) {
        throw InvalidScenario("RunLog: row width does not match the column count");
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
        columns_[i].values.push_back(row[i]);
    }
}

bool RunLog::has(const std::string& name) const noexcept
{
    return std::any_of(columns_.begin(), columns_.end(), [&](const LogColumn& c) { return c.name == name; });
}

std::span<const double> RunLog::column(const std::string& name) const
{
    for (const auto& c : columns_) {
        if (c.name == name) {
            return c.values;
        }
    }
    throw RangeError("RunLog: no column named '" + name + "'");
}

double power_reference(std::span<const TclAgent> agents, double ambient, double x_p, double x_p_rate) noexcept
{
    double num = 0.0;
    double den = 0.0;
    for (const auto& a : agents) {
        const auto& p = a.params;
        const double duty =
            (ambient - x_p - p.resistance * p.capacitance * x_p_rate) / (p.resistance * p.power);
        const double weight = p.electrical_power();
        num += weight * std::clamp(duty, 0.0, 1.0);
        den += weight;
    }
    return den > 0.0 ? num / den : 0.0;
}

namespace {

// Column indices of a row; -1 when a column is not part of the mode.
struct Layout {
    std::vector<double> row;
    std::size_t t, x_e, x_p, x_p_rate, x_ref, band_lower, u_raw, u_applied, y, y_d, e, power_ref;
    std::size_t power = npos, n_agents = npos, band_excursion = npos, drift_bound = npos;
    std::size_t power_pde = npos, n_agg = npos, mass_on = npos, mass_off = npos, l1_on = npos, l1_off = npos,
                gamma = npos, cum_delta = npos, cum_sigma_upper = npos, cum_sigma_lower = npos,
                cum_abs_delta = npos, cum_abs_sigma_upper = npos, cum_abs_sigma_lower = npos;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    void set(std::size_t idx, double value)
    {
        if (idx != npos) {
            row[idx] = value;
        }
    }
};

Layout make_layout(RunLog& log, bool with_agents, bool with_pde)
{
    Layout l{};
    l.t = log.add_column("t", "h");
    l.x_e = log.add_column("x_e", "degC");
    l.x_p = log.add_column("x_p", "degC");
    l.x_p_rate = log.add_column("x_p_rate", "degC/h");
    l.x_ref = log.add_column("x_ref", "degC");
    l.band_lower = log.add_column("band_lower", "degC");
    l.u_raw = log.add_column("u_raw", "degC/h");
    l.u_applied = log.add_column("u_applied", "degC/h");
    l.y = log.add_column("y", "kW*degC");
    l.y_d = log.add_column("y_d", "kW*degC");
    l.e = log.add_column("e", "kW*degC");
    l.power_ref = log.add_column("power_ref", "1");
    if (with_agents) {
        l.power = log.add_column("power", "1");
        l.n_agents = log.add_column("n_agents", "loads");
        l.band_excursion = log.add_column("band_excursion", "degC");
        l.drift_bound = log.add_column("drift_bound", "degC");
    }
    if (with_pde) {
        l.power_pde = log.add_column("power_pde", "1");
        l.n_agg = log.add_column("n_agg", "loads");
        l.mass_on = log.add_column("mass_on", "loads");
        l.mass_off = log.add_column("mass_off", "loads");
        l.l1_on = log.add_column("l1_on", "loads");
        l.l1_off = log.add_column("l1_off", "loads");
        l.gamma = log.add_column("gamma", "kW*degC/h");
        l.cum_delta = log.add_column("cum_delta", "loads");
        l.cum_sigma_upper = log.add_column("cum_sigma_upper", "loads");
        l.cum_sigma_lower = log.add_column("cum_sigma_lower", "loads");
        l.cum_abs_delta = log.add_column("cum_abs_delta", "loads");
        l.cum_abs_sigma_upper = log.add_column("cum_abs_sigma_upper", "loads");
        l.cum_abs_sigma_lower = log.add_column("cum_abs_sigma_lower", "loads");
    }
    l.row.assign(log.columns().size(), 0.0);
    return l;
}

std::vector<std::size_t> pick_samples(std::size_t n, std::size_t k, std::uint64_t seed)
{
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    k = std::min(k, n);
    const CounterRng rng(seed, static_cast<std::uint64_t>(RngStream::agent_sampling));
    for (std::size_t i = 0; i < k; ++i) {
        const auto span = static_cast<double>(n - i);
        const auto j = i + std::min(n - i - 1, static_cast<std::size_t>(rng.uniform(i, 0) * span));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

// Below this the closed loop has diverged; the run is aborted.
constexpr double min_substep = 1e-7;

// Output-tracking quantities at one instant.
struct Measurement {
    double x_p = 0.0;
    double x_p_rate = 0.0;
    double y = 0.0;
    double y_d = 0.0;
    double y_d_rate = 0.0;
    double e = 0.0;
    double u = 0.0;
    OutputWeighting weighting{};
};

// Everything fed to one aggregate-model step.
struct Forcing {
    NormalizedSystem sys;
    double sigma_upper = 0.0;  // loads/h
    double sigma_lower = 0.0;
};

class Loop {
public:
    explicit Loop(const ScenarioConfig& cfg)
        : cfg_(cfg),
          ctrl_(cfg.controller()),
          with_agents_(cfg.mode != RunMode::pde),
          with_pde_(cfg.mode != RunMode::agents),
          log_(cfg.mode),
          layout_(make_layout(log_, with_agents_, with_pde_)),
          pde_band_(Deadband::centered(cfg.band_center, cfg.band_width)),
          drift_{cfg.population.resistance, cfg.population.capacitance_mean, cfg.population.power,
                 cfg.ambient(0.0)}
    {
        ctrl_.validate();
        state_.x_ref = cfg.band_center;
        const Deadband band0 = pde_band_;
        const bool uniform = cfg.solver.initial == InitialField::uniform;
        if (with_agents_ || !uniform) {
            agents_ = build_population(cfg.n_agents, cfg.population, band0, cfg.seed);
        }
        if (with_pde_) {
            if (uniform) {
                const double density = 0.5 * static_cast<double>(cfg.n_agents) / cfg.band_width;
                field_ = DistributionField(std::vector<double>(cfg.solver.n_cells, density),
                                           std::vector<double>(cfg.solver.n_cells, density));
            } else {
                field_ = estimate_distribution(agents_, band0, cfg.solver.n_cells);
            }
            if (cfg.solver.initial == InitialField::relaxed) {
                relax(cfg.solver.relax_hours);
            }
            ledger_ = ConservationLedger::start(field_, cfg.band_width);
            n_agg0_ = ledger_.initial_total();
        }
        if (with_agents_) {
            log_.sampled_agents = pick_samples(agents_.size(), cfg.output.agent_samples, cfg.seed);
        } else {
            // The reference power still needs a representative load.
            agents_.assign(1, TclAgent{cfg.band_center, Mode::off,
                                       {cfg.population.resistance, cfg.population.capacitance_mean,
                                        cfg.population.power, cfg.population.efficiency}});
        }
    }

    RunLog run()
    {
        const double period = cfg_.control_period;
        const auto n_periods = static_cast<std::size_t>(std::ceil(cfg_.horizon / period - 1e-9));
        try {
            for (std::size_t k = 0; k <= n_periods; ++k) {
                const double t = std::min(static_cast<double>(k) * period, cfg_.horizon);
                const bool last = k == n_periods;
                const double t_next = std::min(static_cast<double>(k + 1) * period, cfg_.horizon);
                period_step(t, last ? 0.0 : t_next - t, k, last);
            }
        } catch (const Error& err) {
            const std::string what = "run aborted at row " + std::to_string(log_.n_rows()) + ": " + err.what();
            throw RunAborted(what, std::move(log_));
        }
        return std::move(log_);
    }

private:
    Measurement measure_pde(double t)
    {
        Measurement m = trajectory(t);
        m.y = weighted_output(field_, pde_band_, m.weighting, drift_.power, cfg_.population.efficiency);
        m.e = m.y - m.y_d;
        if (cfg_.control_enabled) {
            m.u = control(field_, pde_band_, m, t);
        }
        return m;
    }

    Measurement measure_agents(double t)
    {
        Measurement m = trajectory(t);
        m.y = weighted_output(agents_, m.weighting);
        m.e = m.y - m.y_d;
        if (cfg_.control_enabled) {
            const Deadband band = agent_band();
            const auto histogram = estimate_distribution(agents_, band, cfg_.solver.n_cells, t);
            m.u = control(histogram, band, m, t);
        }
        return m;
    }

    Measurement trajectory(double t) const
    {
        Measurement m;
        const auto xp = eval_trajectory(ctrl_.x_p, t);
        const auto yd = eval_trajectory(ctrl_.y_d, t);
        m.x_p = xp.value;
        m.x_p_rate = xp.rate;
        m.y_d = yd.value;
        m.weighting = OutputWeighting::around(ctrl_.a, xp.value);
        m.y_d_rate = yd.rate;
        return m;
    }

    double control(const DistributionField& field, const Deadband& band, const Measurement& m, double t)
    {
        ControlInputs in;
        in.weighting = m.weighting;
        in.b_rate = -ctrl_.a * m.x_p_rate;
        in.phi = stabilizer(m.e, m.y_d_rate, ctrl_.k0);
        in.beta = cfg_.beta;
        in.drift = drift_;
        in.drift.ambient = cfg_.ambient(t);
        in.efficiency = cfg_.population.efficiency;
        in.denom_floor = ctrl_.denom_floor;
        try {
            last_u_ = compute_control_grid(field, band, in);
        } catch (const ControlSingularity&) {
            // zero-order hold of the previous input
        }
        return last_u_;
    }

    Forcing forcing(double t, double u) const
    {
        ThermalDrift drift = drift_;
        drift.ambient = cfg_.ambient(t);
        Forcing f{make_normalized_system(drift, pde_band_, cfg_.beta, u), 0.0, 0.0};
        const auto& dist = cfg_.disturbance;
        switch (dist.source) {
        case SourceModel::none: break;
        case SourceModel::rate: f.sys.delta_hat = delta_model(field_, cfg_.forced_rate); break;
        case SourceModel::sine: {
            const double s = dist.sine_amplitude * std::sin(2.0 * std::numbers::pi * t / dist.sine_period);
            f.sys.delta_hat.resize(field_.n_cells());
            for (std::size_t i = 0; i < field_.n_cells(); ++i) {
                f.sys.delta_hat[i] = s * std::cos(std::numbers::pi * field_.cell_center(i));
            }
            break;
        }
        }
        const double width = pde_band_.width();
        switch (dist.boundary) {
        case BoundaryModel::none: break;
        case BoundaryModel::profile:
            f.sigma_upper = dist.sigma_upper(t);
            f.sigma_lower = dist.sigma_lower(t);
            break;
        case BoundaryModel::thermostat: {
            const auto hat = thermostat_boundary_flux(field_, f.sys);
            f.sigma_upper = hat.upper * width;
            f.sigma_lower = hat.lower * width;
            break;
        }
        }
        f.sys.sigma_upper_hat = f.sigma_upper / width;
        f.sys.sigma_lower_hat = f.sigma_lower / width;
        return f;
    }

    double gamma(const Measurement& m, const Forcing& f) const
    {
        return compute_gamma(field_, pde_band_, m.weighting, drift_.power, cfg_.population.efficiency,
                             f.sys.delta_hat, f.sigma_upper, f.sigma_lower);
    }

    void period_step(double t, double dt, std::size_t k, bool last)
    {
        const double x_e = cfg_.ambient(t);
        const Measurement m = with_agents_ ? measure_agents(t) : measure_pde(t);
        const double u_applied = smooth_control(state_, m.u, ctrl_.smoothing_window);

        auto& l = layout_;
        l.set(l.t, t);
        l.set(l.x_e, x_e);
        l.set(l.x_p, m.x_p);
        l.set(l.x_p_rate, m.x_p_rate);
        l.set(l.x_ref, state_.x_ref);
        l.set(l.band_lower, with_agents_ ? agent_band().lower() : pde_band_.lower());
        l.set(l.u_raw, m.u);
        l.set(l.u_applied, u_applied);
        l.set(l.y, m.y);
        l.set(l.y_d, m.y_d);
        l.set(l.e, m.e);
        l.set(l.power_ref, power_reference(agents_, x_e, m.x_p, m.x_p_rate));
        if (with_agents_) {
            l.set(l.power, aggregate_power(agents_));
            l.set(l.n_agents, static_cast<double>(agents_.size()));
            l.set(l.band_excursion, band_excursion(agents_, agent_band()));
            l.set(l.drift_bound, drift_bound_);
        }
        if (with_pde_) {
            const Forcing f = forcing(t, with_agents_ ? u_applied : m.u);
            const double width = pde_band_.width();
            const double on = loads_from_integral(field_.integral_on(), width);
            const double off = loads_from_integral(field_.integral_off(), width);
            l.set(l.power_pde, on / n_agg0_);
            l.set(l.n_agg, on + off);
            l.set(l.mass_on, on);
            l.set(l.mass_off, off);
            l.set(l.l1_on, l1_norm(field_.w(), width));
            l.set(l.l1_off, l1_norm(field_.v(), width));
            l.set(l.gamma, gamma(m, f));
            l.set(l.cum_delta, ledger_.cum_delta);
            l.set(l.cum_sigma_upper, ledger_.cum_sigma_upper);
            l.set(l.cum_sigma_lower, ledger_.cum_sigma_lower);
            l.set(l.cum_abs_delta, ledger_.cum_abs_delta);
            l.set(l.cum_abs_sigma_upper, ledger_.cum_abs_sigma_upper);
            l.set(l.cum_abs_sigma_lower, ledger_.cum_abs_sigma_lower);
        }
        for (double v : l.row) {
            if (!std::isfinite(v)) {
                throw NumericFailure("non-finite value in log row at t=" + std::to_string(t));
            }
        }
        log_.push_row(l.row);
        if (with_agents_ && k % std::max<std::size_t>(1, cfg_.output.sample_stride) == 0) {
            std::vector<double> temps;
            temps.reserve(log_.sampled_agents.size());
            for (std::size_t i : log_.sampled_agents) {
                temps.push_back(agents_[i].temp);
            }
            log_.sample_times.push_back(t);
            log_.agent_temps.push_back(std::move(temps));
        }
        if (last) {
            return;
        }

        const double x_ref_before = state_.x_ref;
        state_ = advance_reference(state_, u_applied, dt);
        if (with_pde_) {
            advance_pde(t, t + dt, u_applied);
        }
        if (with_agents_) {
            drift_bound_ = max_step_drift(agents_, x_e, dt) + std::abs(state_.x_ref - x_ref_before);
            PopulationStep step;
            step.ambient = x_e;
            step.dt = dt;
            step.band = agent_band();
            step.noise_beta = cfg_.agent_noise ? cfg_.beta : 0.0;
            step.forced_rate = cfg_.forced_rate;
            step.seed = cfg_.seed;
            step.step_index = k;
            step_population(agents_, step);
        }
    }

    // With agents present the model follows the agents' band (u_hold);
    // alone it is its own closed loop, re-evaluated every substep.
    void advance_pde(double t, double t_end, double u_hold)
    {
        while (t < t_end) {
            const double u = with_agents_ ? u_hold : measure_pde(t).u;
            const Forcing f = forcing(t, u);
            double dt = cfg_.solver.dt ? *cfg_.solver.dt : admissible_dt(field_, f.sys);
            if (dt < min_substep) {
                throw NumericFailure("PDE step size collapsed to " + std::to_string(dt) + " h at t=" +
                                     std::to_string(t) + " (u=" + std::to_string(u) + " degC/h)");
            }
            if (!cfg_.solver.dt && t_end - t < 1.5 * dt) {
                // Split the remainder evenly instead of leaving a sliver.
                dt = t_end - t > dt ? 0.5 * (t_end - t) : t_end - t;
            }
            dt = std::min(dt, t_end - t);
            ledger_.record(dt, f.sys.delta_hat, field_.dz(), pde_band_.width(), f.sigma_upper, f.sigma_lower);
            field_ = fpe_step(field_, f.sys, dt);
            pde_band_ = pde_band_.shifted(u * dt);
            t = t_end - t <= dt ? t_end : t + dt;
            field_.set_time(t);
        }
    }

    void relax(double hours)
    {
        double t = 0.0;
        while (t < hours) {
            const Forcing f = forcing(0.0, 0.0);
            const double dt = std::min(admissible_dt(field_, f.sys), hours - t);
            field_ = fpe_step(field_, f.sys, dt);
            t += dt;
        }
        field_.set_time(0.0);
    }

    [[nodiscard]] Deadband agent_band() const { return Deadband::centered(state_.x_ref, cfg_.band_width); }

    const ScenarioConfig& cfg_;
    ControllerConfig ctrl_;
    bool with_agents_;
    bool with_pde_;
    RunLog log_;
    Layout layout_;
    Deadband pde_band_;
    ThermalDrift drift_;
    ControllerState state_{};
    std::vector<TclAgent> agents_;
    DistributionField field_;
    ConservationLedger ledger_{};
    double n_agg0_ = 1.0;
    double last_u_ = 0.0;
    double drift_bound_ = 0.0;
};

}  // namespace

RunLog run_scenario(const ScenarioConfig& cfg)
{
    cfg.validate();
    Loop loop(cfg);
    return loop.run();
}

}  // namespace tclfp
