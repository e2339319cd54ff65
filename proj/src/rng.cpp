#include "wlc/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace wlc {

std::size_t Rng::uniform_index(std::size_t n) {
    const std::uint64_t range = static_cast<std::uint64_t>(n);
    // reject the lowest 2^64 mod n values so the remainder is unbiased
    const std::uint64_t threshold = (0 - range) % range;
    std::uint64_t draw = engine_();
    while (draw < threshold) draw = engine_();
    return static_cast<std::size_t>(draw % range);
}

double Rng::uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    // splitmix64 finaliser over the combined state
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace wlc
