#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace tsnet::rng {

using Engine = std::mt19937_64;

// Draws below avoid std::uniform_*_distribution so that a seed pins the
// exact bit pattern of every sample independent of the standard library.

// Uniform in [0, 1), 53 bits of precision.
inline double uniform_unit(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline double uniform(Engine& eng, double lo, double hi) {
    return lo + (hi - lo) * uniform_unit(eng);
}

// Unbiased integer in [0, n) via rejection.
inline std::uint64_t uniform_index(Engine& eng, std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t draw;
    do {
        draw = eng();
    } while (draw >= limit);
    return draw % n;
}

// Box-Muller without the cached second sample; one draw per call keeps the
// stream position predictable.
inline double normal(Engine& eng, double mean = 0.0, double stddev = 1.0) {
    double u1;
    do {
        u1 = uniform_unit(eng);
    } while (u1 <= 0.0);
    const double u2 = uniform_unit(eng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * M_PI * u2);
}

// Fisher-Yates with our own index draws.
template <typename T>
void shuffle(std::vector<T>& values, Engine& eng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(uniform_index(eng, i));
        std::swap(values[i - 1], values[j]);
    }
}

}  // namespace tsnet::rng
