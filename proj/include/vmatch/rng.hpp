#pragma once

#include <cmath>
#include <cstdint>

namespace vmatch {

// Counter-based random numbers.
//
// Everything random in this library is derived by hashing a small tuple of
// integers (seed, object id, step, trial, ...) through the splitmix64
// finalizer.  There is no generator state to share or advance, so any worker
// can compute "its" random values independently and the result never depends
// on scheduling or thread count.

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t hash2(std::uint64_t a, std::uint64_t b) {
    return mix64(a ^ mix64(b));
}

inline std::uint64_t hash3(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix64(hash2(a, b) ^ mix64(c));
}

inline std::uint64_t hash4(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                           std::uint64_t d) {
    return mix64(hash3(a, b, c) ^ mix64(d));
}

// Uniform double in [0, 1) from a hash value (53 mantissa bits).
inline double unit_double(std::uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Uniform double in [-1, 1].
inline double signed_unit(std::uint64_t h) {
    return unit_double(h) * 2.0 - 1.0;
}

// Standard normal deviate from two independent hash values (Box-Muller).
inline double gaussian(std::uint64_t h1, std::uint64_t h2) {
    // Guard against log(0): nudge u1 away from zero.
    double u1 = unit_double(h1);
    if (u1 < 0x1.0p-53) u1 = 0x1.0p-53;
    const double u2 = unit_double(h2);
    const double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

} // namespace vmatch
