#pragma once

#include <cstdint>

namespace lm2m::sim {

inline constexpr double kDefaultNoise = 0.25;

/// 20 + 5 sin(2 pi t / 600) plus uniform noise in [-noise, +noise] drawn
/// deterministically from (seed, t).
double temperature(double t_s, std::uint64_t seed, double noise = kDefaultNoise);

} // namespace lm2m::sim
