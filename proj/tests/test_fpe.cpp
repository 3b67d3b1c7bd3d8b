#include "tclfp/deadband.hpp"
#include "tclfp/error.hpp"
#include "tclfp/fpe.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace tclfp;

namespace {

const Deadband kBand = Deadband::centered(20.0, 0.5);

NormalizedSystem pure_diffusion(double beta_hat)
{
    NormalizedSystem sys;
    sys.beta_hat = beta_hat;
    sys.alpha_hat_on = [](double) { return 0.0; };
    sys.alpha_hat_off = [](double) { return 0.0; };
    return sys;
}

double sum_dz(std::span<const double> f, double dz)
{
    return std::accumulate(f.begin(), f.end(), 0.0) * dz;
}

// Cell averages of a unit-mass Gaussian centred at 0.5.
std::vector<double> gaussian_cells(std::size_t n, double variance)
{
    std::vector<double> out(n);
    const double dz = 1.0 / static_cast<double>(n);
    const double s = std::sqrt(2.0 * variance);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = (static_cast<double>(i) * dz - 0.5) / s;
        const double b = (static_cast<double>(i + 1) * dz - 0.5) / s;
        out[i] = 0.5 * (std::erf(b) - std::erf(a)) / dz;
    }
    return out;
}

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

}  // namespace

TEST(Normalize, BandEndpoints)
{
    EXPECT_DOUBLE_EQ(normalize(19.75, kBand), 0.0);
    EXPECT_DOUBLE_EQ(normalize(20.25, kBand), 1.0);
}

TEST(Normalize, RoundTrip)
{
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> dist(15.0, 25.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = dist(gen);
        EXPECT_NEAR(denormalize(normalize(x, kBand), kBand), x, 1e-14 * std::abs(x));
    }
}

TEST(FpeStep, ZeroFieldStaysZero)
{
    const auto sys = make_normalized_system(ThermalDrift{}, kBand, 0.1, 0.0);
    const auto f = DistributionField::zeros(20);
    const auto next = fpe_step(f, sys, admissible_dt(f, sys));
    for (std::size_t i = 0; i < 20; ++i) {
        EXPECT_EQ(next.w()[i], 0.0);
        EXPECT_EQ(next.v()[i], 0.0);
    }
}

TEST(FpeStep, OneStepMassChangeTelescopes)
{
    const auto f = random_field(64, 3);
    auto sys = make_normalized_system(ThermalDrift{}, kBand, 0.1, -0.7, 40.0, -25.0);
    sys.delta_hat = delta_model(f, 0.5);
    const double dt = admissible_dt(f, sys);
    const auto next = fpe_step(f, sys, dt);
    const double dz = f.dz();
    const double source = sum_dz(sys.delta_hat, dz);
    const double expected_on = dt * (sys.sigma_upper_hat - sys.sigma_lower_hat + source);
    const double scale = sum_dz(f.w(), dz);
    EXPECT_NEAR(next.integral_on() - f.integral_on(), expected_on, 1e-12 * scale);
    EXPECT_NEAR(next.integral_off() - f.integral_off(), -expected_on, 1e-12 * scale);
}

TEST(FpeStep, RejectsStepAboveStabilityBound)
{
    const auto f = random_field(16, 4);
    const auto sys = make_normalized_system(ThermalDrift{}, kBand, 0.1, 0.0);
    const double limit = admissible_dt(f, sys);
    try {
        (void)fpe_step(f, sys, 2.0 * limit);
        FAIL() << "expected StepSizeError";
    } catch (const StepSizeError& e) {
        EXPECT_DOUBLE_EQ(e.admissible_dt, limit);
    }
}

TEST(FpeStep, HeatKernelConvergesUnderRefinement)
{
    const double beta_hat = 0.4;
    const double var0 = 0.0025;
    const double t_end = 0.005;
    std::vector<double> errors;
    for (std::size_t n : {50u, 100u, 200u}) {
        DistributionField f(gaussian_cells(n, var0), std::vector<double>(n, 0.0));
        const auto sys = pure_diffusion(beta_hat);
        const double dt_max = admissible_dt(f, sys);
        const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt_max));
        const double dt = t_end / static_cast<double>(steps);
        for (std::size_t k = 0; k < steps; ++k) {
            f = fpe_step(f, sys, dt);
        }
        const auto exact = gaussian_cells(n, var0 + 2.0 * beta_hat * t_end);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            ss += (f.w()[i] - exact[i]) * (f.w()[i] - exact[i]) * f.dz();
        }
        errors.push_back(std::sqrt(ss));
    }
    for (std::size_t k = 1; k < errors.size(); ++k) {
        EXPECT_GE(std::log2(errors[k - 1] / errors[k]), 0.9) << "refinement " << k;
    }
}

TEST(AdmissibleDt, PureDiffusionFormula)
{
    const auto f = DistributionField::zeros(100);
    EXPECT_NEAR(admissible_dt(f, pure_diffusion(0.4)), 6.25e-5, 1e-18);
}

TEST(AdmissibleDt, DoublingCellsQuartersStep)
{
    const auto sys = pure_diffusion(0.4);
    const double coarse = admissible_dt(DistributionField::zeros(50), sys);
    const double fine = admissible_dt(DistributionField::zeros(100), sys);
    EXPECT_NEAR(fine / coarse, 0.25, 1e-12);
}

TEST(AdmissibleDt, DegenerateSystemThrows)
{
    EXPECT_THROW((void)admissible_dt(DistributionField::zeros(10), pure_diffusion(0.0)), InvalidScenario);
}

TEST(DeltaModel, VanishesForEqualFieldsOrZeroRate)
{
    std::vector<double> same{1.0, 2.0, 3.0};
    const DistributionField f(same, same);
    for (double d : delta_model(f, 0.5)) {
        EXPECT_EQ(d, 0.0);
    }
    const auto g = random_field(8, 2);
    for (double d : delta_model(g, 0.0)) {
        EXPECT_EQ(d, 0.0);
    }
}

TEST(ThermostatClosure, ConservesTotalMass)
{
    auto f = random_field(50, 6);
    const double total0 = f.integral_on() + f.integral_off();
    ThermalDrift drift;
    drift.ambient = 30.0;
    for (int k = 0; k < 2000; ++k) {
        auto sys = make_normalized_system(drift, kBand, 0.1, 0.0);
        sys.delta_hat = delta_model(f, 0.5);
        const auto b = thermostat_boundary_flux(f, sys);
        sys.sigma_upper_hat = b.upper;
        sys.sigma_lower_hat = b.lower;
        f = fpe_step(f, sys, admissible_dt(f, sys));
    }
    EXPECT_NEAR(f.integral_on() + f.integral_off(), total0, 1e-10 * total0);
}

TEST(FpeStep, ZeroFluxRelaxesToExponentialProfile)
{
    // With constant drift c and zero boundary flux the stationary state is
    // w ~ exp(c z / beta_hat); the upwind scheme's discrete fixed point is
    // geometric with ratio (1 + c dz / beta_hat) for c > 0.
    const std::size_t n = 40;
    NormalizedSystem sys = pure_diffusion(0.4);
    sys.alpha_hat_on = [](double) { return 0.3; };
    DistributionField f(std::vector<double>(n, 1.0), std::vector<double>(n, 1.0));
    const double dt = admissible_dt(f, sys);
    for (int k = 0; k < 200000; ++k) {
        f = fpe_step(f, sys, dt);
    }
    const double ratio = 1.0 + 0.3 * f.dz() / 0.4;
    for (std::size_t i = 1; i < n; ++i) {
        EXPECT_NEAR(f.w()[i] / f.w()[i - 1], ratio, 1e-9);
    }
}
