#pragma once

#include "tclfp/error.hpp"

#include <cmath>

namespace tclfp {

/// Thermostat deadband [lower, lower + width] in degrees Celsius. The width
/// is fixed for the lifetime of a scenario; only the position moves.
class Deadband {
public:
    Deadband(double lower, double width) : lower_(lower), width_(width)
    {
        if (!(width > 0.0) || !std::isfinite(width) || !std::isfinite(lower)) {
            throw InvalidScenario("deadband width must be positive and finite");
        }
    }

    static Deadband centered(double center, double width) { return {center - 0.5 * width, width}; }

    [[nodiscard]] double lower() const noexcept { return lower_; }
    [[nodiscard]] double upper() const noexcept { return lower_ + width_; }
    [[nodiscard]] double width() const noexcept { return width_; }
    [[nodiscard]] double center() const noexcept { return lower_ + 0.5 * width_; }

    [[nodiscard]] Deadband shifted(double offset) const { return {lower_ + offset, width_}; }

    /// Distance by which `temp` lies outside the band (0 inside).
    [[nodiscard]] double excursion(double temp) const noexcept
    {
        if (temp < lower_) {
            return lower_ - temp;
        }
        if (temp > upper()) {
            return temp - upper();
        }
        return 0.0;
    }

private:
    double lower_;
    double width_;
};

/// z = (x - lower) / width, mapping the moving band onto [0, 1].
[[nodiscard]] inline double normalize(double temp, const Deadband& band) noexcept
{
    return (temp - band.lower()) / band.width();
}

[[nodiscard]] inline double denormalize(double z, const Deadband& band) noexcept
{
    return band.lower() + z * band.width();
}

}  // namespace tclfp
