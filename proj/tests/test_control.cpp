#include "tclfp/control.hpp"
#include "tclfp/error.hpp"
#include "tclfp/fpe.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace tclfp;

namespace {

const Deadband kBand = Deadband::centered(20.0, 0.5);

ControlInputs table_inputs()
{
    ControlInputs in;
    in.weighting = OutputWeighting::around(-1.0, 20.0);
    in.drift = ThermalDrift{2.0, 10.0, 14.0, 32.0};
    in.denom_floor = 1e-3;
    return in;
}

DistributionField uniform_on(std::size_t n, double density)
{
    return {std::vector<double>(n, density), std::vector<double>(n, 0.0)};
}

}  // namespace

TEST(WeightedOutput, ZeroField)
{
    EXPECT_EQ(weighted_output(DistributionField::zeros(10), kBand, OutputWeighting::around(-1.0, 20.0), 14.0, 2.5),
              0.0);
}

TEST(WeightedOutput, UniformFieldCentredOnSetpoint)
{
    EXPECT_NEAR(weighted_output(uniform_on(20, 2.0), kBand, OutputWeighting::around(-1.0, 20.0), 14.0, 2.5), 0.0,
                1e-12);
}

TEST(WeightedOutput, UniformFieldWithSetpointAtLowerEdge)
{
    EXPECT_NEAR(weighted_output(uniform_on(20, 2.0), kBand, OutputWeighting::around(-1.0, 19.75), 14.0, 2.5), -1.4,
                1e-12);
}

TEST(WeightedOutput, AgentSumCountsOnlyOnLoads)
{
    std::vector<TclAgent> agents{{19.9, Mode::on, {}}, {20.1, Mode::off, {}}, {20.2, Mode::on, {}}};
    const double expected = 14.0 / 2.5 * (-(19.9 - 20.0) - (20.2 - 20.0));
    EXPECT_NEAR(weighted_output(agents, OutputWeighting::around(-1.0, 20.0)), expected, 1e-12);
}

TEST(ComputeControl, UniformFieldFollowsOnDrift)
{
    // int w dx = 1 and int alpha_1 w dx = -0.8 at x_e = 32.
    EXPECT_NEAR(compute_control(uniform_on(10, 2.0), kBand, table_inputs()), -0.8, 1e-12);
}

TEST(ComputeControl, CancellingAuxiliaryInputGivesZero)
{
    auto in = table_inputs();
    in.phi = in.weighting.a * in.drift.power / in.efficiency * -0.8;
    EXPECT_NEAR(compute_control(uniform_on(10, 2.0), kBand, in), 0.0, 1e-12);
}

TEST(ComputeControl, SingularBelowFloor)
{
    auto in = table_inputs();
    in.denom_floor = 100.0;
    EXPECT_THROW((void)compute_control(uniform_on(10, 2.0), kBand, in), ControlSingularity);
    EXPECT_THROW((void)compute_control_grid(uniform_on(10, 2.0), kBand, in), ControlSingularity);
}

TEST(ComputeControlGrid, ApproachesContinuumLawUnderRefinement)
{
    auto gap = [](std::size_t n) {
        const auto f = uniform_on(n, 2.0);
        return std::abs(compute_control_grid(f, kBand, table_inputs()) - compute_control(f, kBand, table_inputs()));
    };
    EXPECT_LT(gap(50), 0.05);
    EXPECT_NEAR(gap(50) / gap(100), 2.0, 0.1);
}

TEST(ComputeControlGrid, OutputRateEqualsAuxiliaryInput)
{
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> dist(500.0, 3000.0);
    std::vector<double> w(60), v(60);
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = dist(gen);
        v[i] = dist(gen);
    }
    const DistributionField f(w, v);
    for (double phi : {-250.0, 0.0, 100.0}) {
        auto in = table_inputs();
        in.phi = phi;
        const double u = compute_control_grid(f, kBand, in);
        const auto sys = make_normalized_system(in.drift, kBand, in.beta, u);
        const double dt = 1e-3 * admissible_dt(f, sys);
        const double y0 = weighted_output(f, kBand, in.weighting, 14.0, 2.5);
        const double y1 = weighted_output(fpe_step(f, sys, dt), kBand.shifted(u * dt), in.weighting, 14.0, 2.5);
        EXPECT_NEAR((y1 - y0) / dt, phi, 1e-3 * (1.0 + std::abs(y0)));
    }
}

TEST(Stabilizer, Examples)
{
    EXPECT_EQ(stabilizer(0.0, 0.0, 7.5), 0.0);
    EXPECT_EQ(stabilizer(1.0, 0.0, 7.5), -7.5);
    EXPECT_EQ(stabilizer(-2.0, 3.0, 7.5), 18.0);
}

TEST(ErrorClosedForm, PureDecay)
{
    const auto r = error_closed_form(1.0, 7.5, [](double) { return 0.0; }, 1.0);
    EXPECT_NEAR(r.error, std::exp(-7.5), 1e-12);
    EXPECT_NEAR(r.error, 5.5308e-4, 1e-8);
}

TEST(ErrorClosedForm, ConstantDisturbanceReachesAsymptote)
{
    const double c = 3.0;
    const auto r = error_closed_form(0.0, 7.5, [c](double) { return c; }, 10.0 / 7.5, c);
    EXPECT_NEAR(r.error, c / 7.5, 1e-4 * c / 7.5);
    EXPECT_NEAR(r.bound, c / 7.5 * (1.0 - std::exp(-10.0)), 1e-12);
}

TEST(ErrorClosedForm, ZeroStaysZero)
{
    for (double t : {0.0, 0.1, 1.0}) {
        EXPECT_EQ(error_closed_form(0.0, 7.5, [](double) { return 0.0; }, t).error, 0.0);
    }
}

TEST(SmoothControl, WindowMean)
{
    ControllerState s;
    EXPECT_EQ(smooth_control(s, 2.0, 10), 2.0);
    ControllerState t;
    (void)smooth_control(t, 1.0, 3);
    (void)smooth_control(t, 2.0, 3);
    EXPECT_EQ(smooth_control(t, 3.0, 3), 2.0);
}

TEST(SmoothControl, ConstantStreamIsFixedPoint)
{
    ControllerState s;
    double out = 0.0;
    for (int k = 0; k < 25; ++k) {
        out = smooth_control(s, 0.7, 10);
    }
    EXPECT_DOUBLE_EQ(out, 0.7);
    EXPECT_EQ(s.u_history.size(), 10u);
}

TEST(AdvanceReference, ConstantInputs)
{
    ControllerState s;
    s.x_ref = 20.0;
    for (int k = 0; k < 100; ++k) {
        s = advance_reference(s, 0.0, 0.01);
    }
    EXPECT_EQ(s.x_ref, 20.0);
    ControllerState r;
    r.x_ref = 20.0;
    for (int k = 0; k < 200; ++k) {
        r = advance_reference(r, 1.0, 0.01);
    }
    EXPECT_NEAR(r.x_ref, 22.0, 1e-12);
}

TEST(AdvanceReference, SecondOrderAccurate)
{
    // The input seen at each call is the value at the start of the step.
    auto integrate = [](int steps) {
        ControllerState s;
        s.x_ref = 0.0;
        const double dt = 1.0 / steps;
        for (int k = 0; k < steps; ++k) {
            s = advance_reference(s, std::sin(k * dt), dt);
        }
        return std::abs(s.x_ref - (1.0 - std::cos(1.0 - dt)));
    };
    const double coarse = integrate(100);
    const double fine = integrate(200);
    EXPECT_GT(std::log2(coarse / fine), 1.8);
}

TEST(ControllerConfig, Validation)
{
    ControllerConfig c;
    EXPECT_NO_THROW(c.validate());
    c.a = 0.0;
    EXPECT_THROW(c.validate(), InvalidScenario);
    c = {};
    c.k0 = 0.0;
    EXPECT_THROW(c.validate(), InvalidScenario);
}
