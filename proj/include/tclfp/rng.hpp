#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace tclfp {

/// Counter-based random numbers: every draw is a pure function of
/// (seed, stream, index, counter), so agents can be stepped in any order
/// or in parallel and still reproduce the same trajectories bit for bit.
class CounterRng {
public:
    constexpr CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

    /// Uniform double in the open interval (0, 1).
    [[nodiscard]] double uniform(std::uint64_t index, std::uint64_t counter) const noexcept
    {
        const std::uint64_t h = mix(key_ ^ mix(index ^ mix(counter + 0x9e3779b97f4a7c15ULL)));
        return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller on counters (2c, 2c+1).
    [[nodiscard]] double normal(std::uint64_t index, std::uint64_t counter) const noexcept
    {
        const double u1 = uniform(index, 2 * counter);
        const double u2 = uniform(index, 2 * counter + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    // splitmix64 finalizer
    static constexpr std::uint64_t mix(std::uint64_t z) noexcept
    {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
};

/// Stream identifiers keep independent draws from colliding.
enum class RngStream : std::uint64_t {
    capacitance = 1,
    initial_temperature = 2,
    initial_mode = 3,
    thermal_noise = 4,
    forced_switch = 5,
    agent_sampling = 6,
};

}  // namespace tclfp
