#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "bvx/grid.hpp"

namespace testing_support {

// Deterministic N(0,1) or U[0,1) grids; `mean_zero` removes the average.
inline bvx::GridFunction random_grid(int n, int depth, std::uint64_t seed, bool mean_zero = true) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    bvx::GridFunction g(n, depth);
    for (std::size_t c = 0; c < g.size(); ++c) g[c] = normal(rng);
    if (mean_zero) {
        const double m = bvx::mean(g);
        for (std::size_t c = 0; c < g.size(); ++c) g[c] -= m;
    }
    return g;
}

inline bvx::GridFunction random_positive(int n, int depth, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> expo;
    std::bernoulli_distribution zero(0.3);
    bvx::GridFunction g(n, depth);
    for (std::size_t c = 0; c < g.size(); ++c) g[c] = zero(rng) ? 0.0 : expo(rng);
    return g;
}

inline bvx::WhitneyFunction random_whitney(const bvx::Lattice& lat, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    bvx::WhitneyFunction f(lat);
    for (std::size_t q = 0; q < lat.size(); ++q) f[q] = normal(rng);
    return f;
}

inline bvx::GridFunction haar(int depth) {
    bvx::GridFunction g(1, depth);
    for (std::size_t c = 0; c < g.size(); ++c) g[c] = c < g.size() / 2 ? 1.0 : -1.0;
    return g;
}

}  // namespace testing_support
