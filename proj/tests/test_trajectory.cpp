#include "tclfp/error.hpp"
#include "tclfp/trajectory.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace tclfp;

TEST(Smoothstep, CoefficientsSumToOne)
{
    const double sum = std::accumulate(kTransitionCoefficients.begin(), kTransitionCoefficients.end(), 0.0);
    EXPECT_EQ(sum, 1.0);
}

TEST(Smoothstep, EndpointsAndMidpoint)
{
    const auto s0 = smoothstep(0.0, kTransitionCoefficients);
    EXPECT_EQ(s0.s, 0.0);
    EXPECT_EQ(s0.ds, 0.0);
    EXPECT_EQ(s0.d2s, 0.0);
    EXPECT_EQ(s0.d3s, 0.0);
    EXPECT_EQ(smoothstep(1.0, kTransitionCoefficients).s, 1.0);
    EXPECT_NEAR(smoothstep(0.5, kTransitionCoefficients).s, 0.5, 1e-15);
}

TEST(Smoothstep, DerivativesMatchFiniteDifferences)
{
    const double h = 1e-5;
    for (double tau : {0.1, 0.37, 0.5, 0.81}) {
        const auto c = smoothstep(tau, kTransitionCoefficients);
        const auto p = smoothstep(tau + h, kTransitionCoefficients);
        const auto m = smoothstep(tau - h, kTransitionCoefficients);
        EXPECT_NEAR(c.ds, (p.s - m.s) / (2 * h), 1e-6);
        EXPECT_NEAR(c.d2s, (p.ds - m.ds) / (2 * h), 1e-5);
        EXPECT_NEAR(c.d3s, (p.d2s - m.d2s) / (2 * h), 1e-4);
    }
}

TEST(EvalTrajectory, TransitionEndpointsAndMidpoint)
{
    const SetpointSchedule sched(20.0, {{2.0, 8.0, 19.5}}, 24.0);
    const auto start = eval_trajectory(sched, 2.0);
    EXPECT_EQ(start.value, 20.0);
    EXPECT_EQ(start.rate, 0.0);
    EXPECT_EQ(start.accel, 0.0);
    EXPECT_EQ(eval_trajectory(sched, 8.0).value, 19.5);
    EXPECT_NEAR(eval_trajectory(sched, 5.0).value, 19.75, 1e-12);
    const auto hold = eval_trajectory(sched, 12.0);
    EXPECT_EQ(hold.value, 19.5);
    EXPECT_EQ(hold.rate, 0.0);
}

TEST(EvalTrajectory, RateScalesWithDuration)
{
    const SetpointSchedule sched(20.0, {{2.0, 8.0, 19.5}}, 24.0);
    const auto mid = eval_trajectory(sched, 5.0);
    EXPECT_NEAR(mid.rate, -0.5 / 6.0 * smoothstep(0.5, kTransitionCoefficients).ds, 1e-12);
}

TEST(EvalTrajectory, OutsideHorizonThrows)
{
    const SetpointSchedule sched(20.0, {}, 24.0);
    EXPECT_THROW((void)eval_trajectory(sched, -0.1), RangeError);
    EXPECT_THROW((void)eval_trajectory(sched, 24.1), RangeError);
}

TEST(SetpointSchedule, RejectsOverlappingOrEmptyTransitions)
{
    EXPECT_THROW(SetpointSchedule(20.0, {{2.0, 8.0, 19.5}, {7.0, 9.0, 20.0}}), ScheduleInvalid);
    EXPECT_THROW(SetpointSchedule(20.0, {{3.0, 3.0, 19.5}}), ScheduleInvalid);
}

TEST(EndpointConditions, StandardCoefficientsPass)
{
    const SetpointSchedule sched(20.0, {{2.0, 8.0, 19.5}, {12.0, 22.0, 20.0}}, 24.0);
    const auto report = verify_endpoint_conditions(sched);
    EXPECT_TRUE(report.pass);
    ASSERT_EQ(report.segments.size(), 2u);
    for (const auto& seg : report.segments) {
        for (int k = 0; k < 3; ++k) {
            EXPECT_LE(seg.start[k], 1e-10);
            EXPECT_LE(seg.end[k], 1e-10);
        }
    }
}

TEST(EndpointConditions, PerturbedCoefficientFails)
{
    auto coeffs = kTransitionCoefficients;
    coeffs[2] += 1.0;
    const SetpointSchedule sched(20.0, {{2.0, 8.0, 19.5}}, 24.0, coeffs);
    EXPECT_THROW((void)verify_endpoint_conditions(sched), ScheduleInvalid);
}

TEST(EndpointConditions, ZeroAmplitudeTransitionPasses)
{
    auto coeffs = kTransitionCoefficients;
    coeffs[2] += 1.0;
    const SetpointSchedule sched(20.0, {{2.0, 8.0, 20.0}}, 24.0, coeffs);
    EXPECT_TRUE(verify_endpoint_conditions(sched).pass);
}
