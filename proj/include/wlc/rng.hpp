#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace wlc {

// Seeded random source with distribution helpers whose output is fully
// specified (the std:: distributions are implementation-defined, which would
// make seeded runs differ between standard libraries).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform integer in [0, n). n must be > 0.
    std::size_t uniform_index(std::size_t n);

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01();

    // Standard normal via Box-Muller.
    double normal();

    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Mixes a base seed with a stream index into an independent child seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

} // namespace wlc
