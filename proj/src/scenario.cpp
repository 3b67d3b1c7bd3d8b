#include "tclfp/scenario.hpp"

#include "tclfp/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

namespace tclfp {

std::string to_string(RunMode mode)
{
    switch (mode) {
    case RunMode::agents: return "agents";
    case RunMode::pde: return "pde";
    case RunMode::coupled: return "coupled";
    }
    return "coupled";
}

RunMode parse_mode(const std::string& name)
{
    if (name == "agents") {
        return RunMode::agents;
    }
    if (name == "pde") {
        return RunMode::pde;
    }
    if (name == "coupled") {
        return RunMode::coupled;
    }
    throw InvalidScenario("unknown mode '" + name + "' (expected agents, pde or coupled)");
}

AmbientProfile::AmbientProfile(std::vector<std::pair<double, double>> knots) : knots_(std::move(knots))
{
    if (knots_.empty()) {
        throw InvalidScenario("ambient: table needs at least one knot");
    }
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        if (!std::isfinite(knots_[i].first) || !std::isfinite(knots_[i].second)) {
            throw InvalidScenario("ambient: non-finite knot");
        }
        if (i > 0 && !(knots_[i].first > knots_[i - 1].first)) {
            throw InvalidScenario("ambient: knot times must be strictly increasing");
        }
    }
}

double AmbientProfile::operator()(double t) const noexcept
{
    if (t <= knots_.front().first) {
        return knots_.front().second;
    }
    if (t >= knots_.back().first) {
        return knots_.back().second;
    }
    const auto hi = std::upper_bound(knots_.begin(), knots_.end(), t,
                                     [](double v, const auto& k) { return v < k.first; });
    const auto lo = hi - 1;
    const double s = (t - lo->first) / (hi->first - lo->first);
    return lo->second + s * (hi->second - lo->second);
}

double FluxProfile::operator()(double t) const noexcept
{
    return offset + amplitude * std::sin(2.0 * std::numbers::pi * t / period + phase);
}

double FluxProfile::envelope() const noexcept { return std::abs(offset) + std::abs(amplitude); }

ControllerConfig ScenarioConfig::controller() const
{
    ControllerConfig c;
    c.a = a;
    c.k0 = k0;
    c.y_d = y_d;
    c.x_p = x_p;
    c.smoothing_window = smoothing_window;
    c.denom_floor = resolved_denom_floor();
    return c;
}

void ScenarioConfig::validate() const
{
    auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
    if (!positive(horizon)) {
        throw InvalidScenario("horizon must be positive");
    }
    if (n_agents == 0) {
        throw InvalidScenario("population.n must be at least 1");
    }
    TclParameters{population.resistance, population.capacitance_mean, population.power, population.efficiency}
        .validate();
    if (!(population.capacitance_std >= 0.0)) {
        throw InvalidScenario("population.capacitance.std must be non-negative");
    }
    if (!positive(band_width)) {
        throw InvalidScenario("deadband.width must be positive");
    }
    if (!std::isfinite(band_center)) {
        throw InvalidScenario("deadband.center must be finite");
    }
    if (!positive(beta)) {
        throw InvalidScenario("diffusivity must be positive");
    }
    if (!(forced_rate >= 0.0) || !std::isfinite(forced_rate)) {
        throw InvalidScenario("forced_switching.rate must be non-negative");
    }
    if (!positive(control_period)) {
        throw InvalidScenario("controller.period must be positive");
    }
    if (!positive(disturbance.sine_period) || !positive(disturbance.sigma_upper.period) ||
        !positive(disturbance.sigma_lower.period)) {
        throw InvalidScenario("disturbance periods must be positive");
    }
    if (solver.n_cells < 4) {
        throw InvalidScenario("solver.n_cells must be at least 4");
    }
    if (!(solver.relax_hours >= 0.0) || !std::isfinite(solver.relax_hours)) {
        throw InvalidScenario("solver.relax_hours must be finite and non-negative");
    }
    if (solver.dt && !positive(*solver.dt)) {
        throw InvalidScenario("solver.dt must be positive");
    }
    controller().validate();
}

ScenarioConfig default_scenario()
{
    ScenarioConfig cfg;
    cfg.ambient = AmbientProfile({{0.0, 29.0}, {4.0, 28.0}, {9.0, 29.5}, {14.0, 32.0}, {18.0, 31.5}, {24.0, 29.0}});
    cfg.x_p = SetpointSchedule(20.0, {{2.0, 8.0, 19.5}, {12.0, 22.0, 20.0}});
    return cfg;
}

namespace {

const char* initial_name(InitialField f)
{
    switch (f) {
    case InitialField::uniform: return "uniform";
    case InitialField::relaxed: return "relaxed";
    case InitialField::population: break;
    }
    return "population";
}

using nlohmann::json;

// Reads fields from a JSON object and rejects keys nobody asked for.
class Reader {
public:
    Reader(const json& j, std::string where) : j_(j), where_(std::move(where))
    {
        if (!j_.is_object()) {
            throw InvalidScenario(where_ + ": expected an object");
        }
    }

    template <class T>
    void get(const char* key, T& out)
    {
        seen_.insert(key);
        if (j_.contains(key)) {
            try {
                out = j_.at(key).get<T>();
            } catch (const json::exception& e) {
                throw InvalidScenario(where_ + "." + key + ": " + e.what());
            }
        }
    }

    [[nodiscard]] const json* child(const char* key)
    {
        seen_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

    [[nodiscard]] std::string path(const char* key) const { return where_ + "." + key; }

    void finish() const
    {
        for (const auto& item : j_.items()) {
            if (!seen_.contains(item.key())) {
                throw InvalidScenario(where_ + ": unknown key '" + item.key() + "'");
            }
        }
    }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

SetpointSchedule schedule_from_json(const json& j, const std::string& where)
{
    Reader r(j, where);
    double initial = 0.0;
    r.get("initial", initial);
    std::vector<Transition> transitions;
    if (const json* list = r.child("transitions")) {
        if (!list->is_array()) {
            throw InvalidScenario(where + ".transitions: expected an array");
        }
        for (const auto& item : *list) {
            Reader t(item, where + ".transitions[]");
            Transition tr;
            t.get("t_start", tr.t_start);
            t.get("t_end", tr.t_end);
            t.get("target", tr.target);
            t.finish();
            transitions.push_back(tr);
        }
    }
    r.finish();
    return {initial, std::move(transitions)};
}

json schedule_to_json(const SetpointSchedule& s)
{
    json list = json::array();
    for (const auto& tr : s.transitions()) {
        list.push_back({{"t_start", tr.t_start}, {"t_end", tr.t_end}, {"target", tr.target}});
    }
    return {{"initial", s.initial()}, {"transitions", list}};
}

FluxProfile flux_from_json(const json& j, const std::string& where)
{
    Reader r(j, where);
    FluxProfile p;
    r.get("offset", p.offset);
    r.get("amplitude", p.amplitude);
    r.get("period", p.period);
    r.get("phase", p.phase);
    r.finish();
    return p;
}

json flux_to_json(const FluxProfile& p)
{
    return {{"offset", p.offset}, {"amplitude", p.amplitude}, {"period", p.period}, {"phase", p.phase}};
}

SourceModel parse_source(const std::string& s)
{
    if (s == "none") {
        return SourceModel::none;
    }
    if (s == "rate") {
        return SourceModel::rate;
    }
    if (s == "sine") {
        return SourceModel::sine;
    }
    throw InvalidScenario("disturbance.delta: unknown model '" + s + "'");
}

const char* source_name(SourceModel m)
{
    switch (m) {
    case SourceModel::none: return "none";
    case SourceModel::rate: return "rate";
    case SourceModel::sine: return "sine";
    }
    return "none";
}

BoundaryModel parse_boundary(const std::string& s)
{
    if (s == "none") {
        return BoundaryModel::none;
    }
    if (s == "profile") {
        return BoundaryModel::profile;
    }
    if (s == "thermostat") {
        return BoundaryModel::thermostat;
    }
    throw InvalidScenario("disturbance.boundary: unknown model '" + s + "'");
}

const char* boundary_name(BoundaryModel m)
{
    switch (m) {
    case BoundaryModel::none: return "none";
    case BoundaryModel::profile: return "profile";
    case BoundaryModel::thermostat: return "thermostat";
    }
    return "none";
}

}  // namespace

ScenarioConfig scenario_from_json(const json& j)
{
    ScenarioConfig cfg = default_scenario();
    Reader root(j, "scenario");

    std::string mode = to_string(cfg.mode);
    root.get("mode", mode);
    cfg.mode = parse_mode(mode);
    root.get("seed", cfg.seed);
    root.get("horizon", cfg.horizon);
    root.get("diffusivity", cfg.beta);

    if (const json* p = root.child("population")) {
        Reader r(*p, "population");
        r.get("n", cfg.n_agents);
        r.get("resistance", cfg.population.resistance);
        r.get("power", cfg.population.power);
        r.get("efficiency", cfg.population.efficiency);
        r.get("noise", cfg.agent_noise);
        if (const json* c = r.child("capacitance")) {
            Reader rc(*c, "population.capacitance");
            std::string law = cfg.population.law == CapacitanceLaw::lognormal ? "lognormal" : "normal";
            rc.get("law", law);
            if (law == "lognormal") {
                cfg.population.law = CapacitanceLaw::lognormal;
            } else if (law == "normal") {
                cfg.population.law = CapacitanceLaw::normal;
            } else {
                throw InvalidScenario("population.capacitance.law: expected lognormal or normal");
            }
            rc.get("mean", cfg.population.capacitance_mean);
            rc.get("std", cfg.population.capacitance_std);
            rc.finish();
        }
        r.finish();
    }
    if (const json* d = root.child("deadband")) {
        Reader r(*d, "deadband");
        r.get("width", cfg.band_width);
        r.get("center", cfg.band_center);
        r.finish();
    }
    if (const json* amb = root.child("ambient")) {
        Reader r(*amb, "ambient");
        std::vector<std::pair<double, double>> knots;
        r.get("table", knots);
        if (!knots.empty()) {
            cfg.ambient = AmbientProfile(std::move(knots));
        }
        r.finish();
    }
    if (const json* f = root.child("forced_switching")) {
        Reader r(*f, "forced_switching");
        r.get("rate", cfg.forced_rate);
        r.finish();
    }
    if (const json* d = root.child("disturbance")) {
        Reader r(*d, "disturbance");
        std::string source = source_name(cfg.disturbance.source);
        r.get("delta", source);
        cfg.disturbance.source = parse_source(source);
        r.get("sine_amplitude", cfg.disturbance.sine_amplitude);
        r.get("sine_period", cfg.disturbance.sine_period);
        std::string boundary = boundary_name(cfg.disturbance.boundary);
        r.get("boundary", boundary);
        cfg.disturbance.boundary = parse_boundary(boundary);
        if (const json* s = r.child("sigma_upper")) {
            cfg.disturbance.sigma_upper = flux_from_json(*s, r.path("sigma_upper"));
        }
        if (const json* s = r.child("sigma_lower")) {
            cfg.disturbance.sigma_lower = flux_from_json(*s, r.path("sigma_lower"));
        }
        r.finish();
    }
    if (const json* c = root.child("controller")) {
        Reader r(*c, "controller");
        r.get("enabled", cfg.control_enabled);
        r.get("a", cfg.a);
        r.get("k0", cfg.k0);
        r.get("smoothing_window", cfg.smoothing_window);
        r.get("period", cfg.control_period);
        if (const json* floor = r.child("denom_floor"); floor && !floor->is_null()) {
            cfg.denom_floor = floor->get<double>();
        }
        if (const json* s = r.child("y_d")) {
            cfg.y_d = schedule_from_json(*s, "controller.y_d");
        }
        if (const json* s = r.child("x_p")) {
            cfg.x_p = schedule_from_json(*s, "controller.x_p");
        }
        r.finish();
    }
    if (const json* s = root.child("solver")) {
        Reader r(*s, "solver");
        r.get("n_cells", cfg.solver.n_cells);
        if (const json* dt = r.child("dt"); dt && !dt->is_null()) {
            cfg.solver.dt = dt->get<double>();
        }
        std::string initial = initial_name(cfg.solver.initial);
        r.get("initial", initial);
        if (initial == "population") {
            cfg.solver.initial = InitialField::population;
        } else if (initial == "uniform") {
            cfg.solver.initial = InitialField::uniform;
        } else if (initial == "relaxed") {
            cfg.solver.initial = InitialField::relaxed;
        } else {
            throw InvalidScenario("solver.initial: expected population, uniform or relaxed");
        }
        r.get("relax_hours", cfg.solver.relax_hours);
        r.finish();
    }
    if (const json* o = root.child("output")) {
        Reader r(*o, "output");
        r.get("agent_samples", cfg.output.agent_samples);
        r.get("sample_stride", cfg.output.sample_stride);
        r.finish();
    }
    root.finish();
    cfg.validate();
    return cfg;
}

json scenario_to_json(const ScenarioConfig& cfg)
{
    json j;
    j["mode"] = to_string(cfg.mode);
    j["seed"] = cfg.seed;
    j["horizon"] = cfg.horizon;
    j["diffusivity"] = cfg.beta;
    j["population"] = {
        {"n", cfg.n_agents},
        {"resistance", cfg.population.resistance},
        {"power", cfg.population.power},
        {"efficiency", cfg.population.efficiency},
        {"noise", cfg.agent_noise},
        {"capacitance",
         {{"law", cfg.population.law == CapacitanceLaw::lognormal ? "lognormal" : "normal"},
          {"mean", cfg.population.capacitance_mean},
          {"std", cfg.population.capacitance_std}}}};
    j["deadband"] = {{"width", cfg.band_width}, {"center", cfg.band_center}};
    j["ambient"] = {{"table", cfg.ambient.knots()}};
    j["forced_switching"] = {{"rate", cfg.forced_rate}};
    j["disturbance"] = {{"delta", source_name(cfg.disturbance.source)},
                        {"sine_amplitude", cfg.disturbance.sine_amplitude},
                        {"sine_period", cfg.disturbance.sine_period},
                        {"boundary", boundary_name(cfg.disturbance.boundary)},
                        {"sigma_upper", flux_to_json(cfg.disturbance.sigma_upper)},
                        {"sigma_lower", flux_to_json(cfg.disturbance.sigma_lower)}};
    j["controller"] = {{"enabled", cfg.control_enabled},
                       {"a", cfg.a},
                       {"k0", cfg.k0},
                       {"smoothing_window", cfg.smoothing_window},
                       {"period", cfg.control_period},
                       {"denom_floor", cfg.resolved_denom_floor()},
                       {"y_d", schedule_to_json(cfg.y_d)},
                       {"x_p", schedule_to_json(cfg.x_p)}};
    j["solver"] = {{"n_cells", cfg.solver.n_cells},
                   {"dt", cfg.solver.dt ? json(*cfg.solver.dt) : json(nullptr)},
                   {"initial", initial_name(cfg.solver.initial)},
                   {"relax_hours", cfg.solver.relax_hours}};
    j["output"] = {{"agent_samples", cfg.output.agent_samples}, {"sample_stride", cfg.output.sample_stride}};
    return j;
}

ScenarioConfig load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open scenario file " + path.string());
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidScenario(path.string() + ": " + e.what());
    }
    return scenario_from_json(j);
}

}  // namespace tclfp
