#pragma once

#include "tclfp/control.hpp"
#include "tclfp/deadband.hpp"
#include "tclfp/field.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <span>
#include <vector>

namespace tclfp {

/// Time-accumulated mass bookkeeping for the ON/OFF populations. All
/// quantities are in loads.
struct ConservationLedger {
    double initial_on = 0.0;
    double initial_off = 0.0;
    double cum_delta = 0.0;          ///< int_0^t int delta dx ds
    double cum_sigma_upper = 0.0;    ///< int_0^t sigma_upper ds
    double cum_sigma_lower = 0.0;    ///< int_0^t sigma_lower ds
    double cum_abs_delta = 0.0;      ///< int_0^t int |delta| dx ds
    double cum_abs_sigma_upper = 0.0;
    double cum_abs_sigma_lower = 0.0;

    [[nodiscard]] static ConservationLedger start(const DistributionField& field, double width) noexcept;

    /// Accumulates one step of length dt. `delta_hat` are the per-cell
    /// normalized sources used in that step (loads/degC/h) and `sigma_*` the
    /// physical boundary fluxes (loads/h).
    void record(double dt, std::span<const double> delta_hat, double dz, double width, double sigma_upper,
                double sigma_lower) noexcept;

    [[nodiscard]] double initial_total() const noexcept { return initial_on + initial_off; }
    [[nodiscard]] double expected_on() const noexcept
    {
        return initial_on + cum_delta + (cum_sigma_upper - cum_sigma_lower);
    }
    [[nodiscard]] double expected_off() const noexcept
    {
        return initial_off - cum_delta - (cum_sigma_upper - cum_sigma_lower);
    }
};

/// Mass-identity residuals relative to the initial population size.
struct ConservationReport {
    double residual_on = 0.0;
    double residual_off = 0.0;
    double residual_total = 0.0;

    [[nodiscard]] bool pass(double tolerance) const noexcept;
};

[[nodiscard]] ConservationReport check_conservation(const ConservationLedger& ledger, const DistributionField& field,
                                                    double width) noexcept;
/// Same, from already-integrated ON/OFF load counts (replay from logs).
[[nodiscard]] ConservationReport check_conservation(const ConservationLedger& ledger, double loads_on,
                                                    double loads_off) noexcept;

/// L1 norm in loads: width * sum |f_i| dz.
[[nodiscard]] double l1_norm(std::span<const double> density, double width) noexcept;

struct L1Sample {
    double time = 0.0;
    double l1_on = 0.0;
    double l1_off = 0.0;
};

struct L1Report {
    double initial_on = 0.0;
    double initial_off = 0.0;
    double m_delta = 0.0;  ///< M: bound on |int int delta| over any set
    double m_sigma = 0.0;  ///< M': bound on |int sigma| over any set
    double bound_on = 0.0;
    double bound_off = 0.0;
    double max_on = 0.0;
    double max_off = 0.0;
    std::size_t violations = 0;
    bool pass = true;
};

/// Checks ||w(t)||_1 <= ||w0||_1 + 2M + 2M' (and the same for v) at every
/// sample, with `tolerance` relative to the initial population size.
[[nodiscard]] L1Report l1_bounds(std::span<const L1Sample> history, double m_delta, double m_sigma,
                                 double tolerance = 1e-10);
[[nodiscard]] L1Report l1_bounds(std::span<const DistributionField> history, double width, double m_delta,
                                 double m_sigma, double tolerance = 1e-10);

/// Gamma = (P/eta) [ (a x_hi + b) sigma_upper - (a x_lo + b) sigma_lower + int (a x + b) delta dx ]
/// with delta given per cell (loads/degC/h) and sigma in loads/h.
[[nodiscard]] double compute_gamma(const DistributionField& field, const Deadband& band, OutputWeighting weighting,
                                   double power, double efficiency, std::span<const double> delta_hat,
                                   double sigma_upper, double sigma_lower) noexcept;

struct ErrorBoundReport {
    double gamma_inf = 0.0;
    double max_excess = 0.0;        ///< max over samples of |e| - bound (<= tolerance passes)
    std::size_t violations = 0;
    double closed_form_error = 0.0; ///< sup |e - e_cf| / sup |e_cf|
    bool bound_pass = true;
    bool closed_form_pass = true;
};

/// Verifies the regulation-error bound pointwise and cross-checks the logged
/// error against the convolution closed form built from the logged Gamma
/// (exact integration of a piecewise-linear Gamma against the kernel).
[[nodiscard]] ErrorBoundReport verify_error_bound(std::span<const double> time, std::span<const double> error,
                                                  std::span<const double> gamma, double k0,
                                                  double bound_tolerance = 1e-6,
                                                  double closed_form_tolerance = 0.01);

[[nodiscard]] nlohmann::json to_json(const ConservationReport& r);
[[nodiscard]] nlohmann::json to_json(const L1Report& r);
[[nodiscard]] nlohmann::json to_json(const ErrorBoundReport& r);

}  // namespace tclfp
