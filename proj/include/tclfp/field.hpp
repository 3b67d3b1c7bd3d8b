#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tclfp {

/// Values of a density extrapolated to the two ends of the normalized domain.
struct BoundaryValues {
    double lower;  ///< z = 0
    double upper;  ///< z = 1
};

/// Cell averages of the ON (w) and OFF (v) load densities on a uniform grid
/// over the normalized coordinate z in [0, 1].
///
/// Densities are stored in loads per degree Celsius, i.e. the value of the
/// physical density at the temperature x = lower + z * width. Integrals over
/// z therefore carry a factor 1/width relative to load counts:
/// loads = width * sum_i(w_i) * dz.
class DistributionField {
public:
    DistributionField() = default;
    DistributionField(std::vector<double> on, std::vector<double> off, double time = 0.0);

    static DistributionField zeros(std::size_t n_cells, double time = 0.0);

    [[nodiscard]] std::size_t n_cells() const noexcept { return w_.size(); }
    [[nodiscard]] double dz() const noexcept { return 1.0 / static_cast<double>(w_.size()); }
    [[nodiscard]] double cell_center(std::size_t i) const noexcept
    {
        return (static_cast<double>(i) + 0.5) * dz();
    }

    [[nodiscard]] std::span<const double> w() const noexcept { return w_; }
    [[nodiscard]] std::span<const double> v() const noexcept { return v_; }
    [[nodiscard]] std::span<double> w() noexcept { return w_; }
    [[nodiscard]] std::span<double> v() noexcept { return v_; }

    [[nodiscard]] double time() const noexcept { return time_; }
    void set_time(double t) noexcept { time_ = t; }

    /// Integral over z of the ON / OFF density (sum of cell averages times dz).
    [[nodiscard]] double integral_on() const noexcept;
    [[nodiscard]] double integral_off() const noexcept;

    /// Linear extrapolation of the two outermost cell averages to z = 0 and z = 1.
    [[nodiscard]] BoundaryValues boundary_on() const noexcept;
    [[nodiscard]] BoundaryValues boundary_off() const noexcept;

    [[nodiscard]] bool all_finite() const noexcept;

private:
    std::vector<double> w_;
    std::vector<double> v_;
    double time_ = 0.0;
};

/// Loads represented by a density integral over z.
[[nodiscard]] inline double loads_from_integral(double integral_z, double width) noexcept
{
    return integral_z * width;
}

}  // namespace tclfp
