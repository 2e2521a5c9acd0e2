#include "lm2m/sim/temperature.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <random>

namespace lm2m::sim {

double temperature(double t_s, std::uint64_t seed, double noise)
{
    double base = 20.0 + 5.0 * std::sin(2.0 * std::numbers::pi * t_s / 600.0);
    if (noise == 0.0)
        return base;
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(std::bit_cast<std::uint64_t>(t_s)),
                      static_cast<std::uint32_t>(std::bit_cast<std::uint64_t>(t_s) >> 32)};
    std::mt19937_64 gen(seq);
    std::uniform_real_distribution<double> dist(-noise, noise);
    return base + dist(gen);
}

} // namespace lm2m::sim
