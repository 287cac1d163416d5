// Deterministic random draws: a fixed mapping from mt19937_64 output to doubles
// so results are reproducible bit-for-bit across platforms and library versions.
#pragma once

#include <cstdint>
#include <random>

namespace rod {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    int pick(int n) { return static_cast<int>(eng_() % static_cast<std::uint64_t>(n)); }

    // Derives an independent stream, e.g. one per orbit index.
    Rng split(std::uint64_t salt) const {
        std::mt19937_64 probe = eng_;
        return Rng(probe() ^ (0x9e3779b97f4a7c15ULL * (salt + 1)));
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace rod
