#pragma once

// Portable sampling helpers. The standard distributions are
// implementation-defined, so seeded runs would not reproduce across
// standard libraries; everything here is built directly on the raw
// 64-bit engine output.

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace svmdmoea {

using Rng = std::mt19937_64;

namespace rnd {

/// Uniform double in [0, 1) with 53 bits of resolution.
template <typename Engine>
double unit(Engine& eng) {
    static_assert(Engine::min() == 0 && Engine::max() == UINT64_MAX, "64-bit engine required");
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

template <typename Engine>
double uniform(Engine& eng, double lo, double hi) {
    return lo + (hi - lo) * unit(eng);
}

/// Uniform integer in [0, n) by rejection (Lemire's nearly-divisionless method).
template <typename Engine>
std::uint64_t below(Engine& eng, std::uint64_t n) {
    std::uint64_t x = eng();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            x = eng();
            m = static_cast<__uint128_t>(x) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

template <typename Engine>
bool coin(Engine& eng, double p) {
    return unit(eng) < p;
}

template <typename T, typename Engine>
void shuffle(std::span<T> xs, Engine& eng) {
    for (std::size_t i = xs.size(); i > 1; --i) {
        std::swap(xs[i - 1], xs[below(eng, i)]);
    }
}

/// SplitMix64 finalizer, used to derive independent sub-seeds.
constexpr std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    return mix(a ^ mix(b));
}

} // namespace rnd
} // namespace svmdmoea
