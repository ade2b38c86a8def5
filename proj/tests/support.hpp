#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace fluxq::testing {

// Seeded generator for property tests; failures report the case index so a
// counterexample can be replayed deterministically.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng_);
    }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

private:
    std::mt19937_64 rng_;
};

inline std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return out;
}

inline constexpr double kCritDelta = 0.86602540378443864676;  // sqrt(3)/2

}  // namespace fluxq::testing
