#pragma once

// Closed-form harmonic oracles for n = 1 piecewise-constant boundary data.

#include <cmath>
#include <numbers>

#include "bvx/grid.hpp"

namespace oracle {

// Antiderivative in s of the 1-periodic half-plane Poisson kernel
// sinh(2 pi t) / (cosh(2 pi t) - cos(2 pi s)), continuous across periods.
inline double periodic_poisson_primitive(double t, double s) {
    const double whole = std::floor(s + 0.5);
    const double r = s - whole;
    const double coth = 1.0 / std::tanh(std::numbers::pi * t);
    return whole + std::atan(coth * std::tan(std::numbers::pi * r)) / std::numbers::pi;
}

// Poisson extension of the periodic extension of g, exact up to rounding.
inline double periodic_poisson(const bvx::GridFunction& g, double t, double x) {
    const double h = std::ldexp(1.0, -g.depth());
    double u = 0.0;
    for (std::size_t c = 0; c < g.size(); ++c) {
        const double lo = h * static_cast<double>(c);
        u += g[c] * (periodic_poisson_primitive(t, x - lo) - periodic_poisson_primitive(t, x - lo - h));
    }
    return u;
}

// Harmonic function on [0,1] x [0,1] in (t, x) with u(0, x) = g, u(1, x) = mean g
// and zero normal derivative at x = 0, 1: cosine series, `terms` modes.
inline double slab_cosine(const bvx::GridFunction& g, double t, double x, int terms = 4000) {
    const double h = std::ldexp(1.0, -g.depth());
    double u = bvx::mean(g);
    for (int k = 1; k <= terms; ++k) {
        const double w = std::numbers::pi * k;
        double a = 0.0;
        for (std::size_t c = 0; c < g.size(); ++c) {
            const double lo = h * static_cast<double>(c);
            a += g[c] * (std::sin(w * (lo + h)) - std::sin(w * lo));
        }
        a *= 2.0 / w;
        // sinh(w (1 - t)) / sinh(w), written to avoid overflow.
        const double decay = std::exp(-w * t) * (1.0 - std::exp(-2.0 * w * (1.0 - t))) / (1.0 - std::exp(-2.0 * w));
        u += a * std::cos(w * x) * decay;
        if (decay < 1e-18) break;
    }
    return u;
}

}  // namespace oracle
