#include "tclfp/diagnostics.hpp"
#include "tclfp/fpe.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace tclfp;

namespace {

const Deadband kBand = Deadband::centered(20.0, 0.5);

DistributionField random_field(std::size_t n, unsigned seed)
{
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> dist(100.0, 5000.0);
    std::vector<double> w(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = dist(gen);
        v[i] = dist(gen);
    }
    return {w, v};
}

struct Evolution {
    ConservationLedger ledger;
    std::vector<DistributionField> history;
};

Evolution evolve(double rate, double sigma_upper, double sigma_lower, int steps)
{
    Evolution out;
    auto f = random_field(40, 12);
    out.ledger = ConservationLedger::start(f, kBand.width());
    out.history.push_back(f);
    ThermalDrift drift;
    for (int k = 0; k < steps; ++k) {
        auto sys = make_normalized_system(drift, kBand, 0.1, -0.3, sigma_upper, sigma_lower);
        if (rate > 0.0) {
            sys.delta_hat = delta_model(f, rate);
        }
        const double dt = admissible_dt(f, sys);
        out.ledger.record(dt, sys.delta_hat, f.dz(), kBand.width(), sigma_upper, sigma_lower);
        f = fpe_step(f, sys, dt);
        out.history.push_back(f);
    }
    return out;
}

}  // namespace

TEST(Conservation, NoSourcesNoFluxes)
{
    const auto ev = evolve(0.0, 0.0, 0.0, 3000);
    const auto r = check_conservation(ev.ledger, ev.history.back(), kBand.width());
    EXPECT_TRUE(r.pass(1e-10));
    EXPECT_LE(std::abs(r.residual_on), 1e-10);
    EXPECT_LE(std::abs(r.residual_off), 1e-10);
}

TEST(Conservation, RateSourceCancelsInTotal)
{
    const auto ev = evolve(0.5, 0.0, 0.0, 3000);
    const auto& last = ev.history.back();
    const auto r = check_conservation(ev.ledger, last, kBand.width());
    EXPECT_TRUE(r.pass(1e-10));
    const auto& first = ev.history.front();
    EXPECT_NEAR(last.integral_on() + last.integral_off(), first.integral_on() + first.integral_off(),
                1e-10 * (first.integral_on() + first.integral_off()));
}

TEST(Conservation, ConstantUpperFluxAccumulates)
{
    const double c = 200.0;
    const auto ev = evolve(0.0, c, 0.0, 2000);
    const auto& first = ev.history.front();
    const auto& last = ev.history.back();
    const double t = last.time() - first.time();
    const double grown = loads_from_integral(last.integral_on() - first.integral_on(), kBand.width());
    EXPECT_NEAR(grown, c * t, 1e-10 * ev.ledger.initial_total());
    EXPECT_TRUE(check_conservation(ev.ledger, last, kBand.width()).pass(1e-10));
}

TEST(L1Bounds, NonIncreasingWithoutDisturbances)
{
    const auto ev = evolve(0.0, 0.0, 0.0, 500);
    const auto r = l1_bounds(ev.history, kBand.width(), 0.0, 0.0);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.violations, 0u);
    EXPECT_LE(r.max_on, r.initial_on * (1.0 + 1e-10));
}

TEST(L1Bounds, HoldWithSourcesAndFluxes)
{
    const auto ev = evolve(0.5, 150.0, -80.0, 1500);
    const auto r = l1_bounds(ev.history, kBand.width(), ev.ledger.cum_abs_delta,
                             ev.ledger.cum_abs_sigma_upper + ev.ledger.cum_abs_sigma_lower);
    EXPECT_TRUE(r.pass);
}

TEST(L1Norm, SignedFieldHandSum)
{
    const std::vector<double> f{1.0, -2.0, 3.0, -4.0};
    EXPECT_DOUBLE_EQ(l1_norm(f, 0.5), 0.5 * 10.0 * 0.25);
}

TEST(L1Bounds, FlagsViolation)
{
    const std::vector<L1Sample> samples{{0.0, 100.0, 100.0}, {1.0, 120.0, 100.0}};
    const auto r = l1_bounds(samples, 5.0, 0.0);
    EXPECT_FALSE(r.pass);
    EXPECT_EQ(r.violations, 1u);
}

TEST(Gamma, ZeroWithoutDisturbances)
{
    const auto f = random_field(20, 1);
    EXPECT_EQ(compute_gamma(f, kBand, OutputWeighting::around(-1.0, 20.0), 14.0, 2.5, {}, 0.0, 0.0), 0.0);
}

TEST(Gamma, SymmetricSourceAboutSetpointVanishes)
{
    const auto f = random_field(20, 1);
    const std::vector<double> delta(20, 3.0);
    EXPECT_NEAR(compute_gamma(f, kBand, OutputWeighting::around(-1.0, 20.0), 14.0, 2.5, delta, 0.0, 0.0), 0.0,
                1e-12);
}

TEST(Gamma, BoundaryFluxPointValues)
{
    const auto f = random_field(20, 1);
    // (P/eta) [(-(20.25 - 20)) 10 - (-(19.75 - 20)) 4] = 5.6 * (-3.5)
    EXPECT_NEAR(compute_gamma(f, kBand, OutputWeighting::around(-1.0, 20.0), 14.0, 2.5, {}, 10.0, 4.0), -19.6,
                1e-12);
}

TEST(ErrorBound, PureDecayMatchesClosedForm)
{
    std::vector<double> t, e, g;
    for (int i = 0; i <= 200; ++i) {
        t.push_back(i * 0.005);
        e.push_back(3.0 * std::exp(-7.5 * t.back()));
        g.push_back(0.0);
    }
    const auto r = verify_error_bound(t, e, g, 7.5);
    EXPECT_TRUE(r.bound_pass);
    EXPECT_TRUE(r.closed_form_pass);
    EXPECT_LE(r.closed_form_error, 1e-12);
}

TEST(ErrorBound, ConstantDisturbanceApproachesAsymptote)
{
    const double c = 4.0;
    std::vector<double> t, e, g;
    for (int i = 0; i <= 400; ++i) {
        t.push_back(i * 0.005);
        e.push_back(c / 7.5 * (1.0 - std::exp(-7.5 * t.back())));
        g.push_back(c);
    }
    const auto r = verify_error_bound(t, e, g, 7.5);
    EXPECT_TRUE(r.bound_pass);
    EXPECT_TRUE(r.closed_form_pass);
    EXPECT_NEAR(r.gamma_inf, c, 0.0);
    EXPECT_NEAR(e.back(), c / 7.5, 1e-4);
}

TEST(ErrorBound, ZeroErrorStaysZero)
{
    const std::vector<double> t{0.0, 0.1, 0.2}, e{0.0, 0.0, 0.0}, g{0.0, 0.0, 0.0};
    const auto r = verify_error_bound(t, e, g, 7.5);
    EXPECT_TRUE(r.bound_pass);
    EXPECT_EQ(r.max_excess, 0.0);
}

TEST(ErrorBound, DetectsExcursionAboveBound)
{
    const std::vector<double> t{0.0, 0.1, 0.2}, e{1.0, 2.0, 0.1}, g{0.0, 0.0, 0.0};
    EXPECT_FALSE(verify_error_bound(t, e, g, 7.5).bound_pass);
}
