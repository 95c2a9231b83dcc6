#pragma once

#include <vector>

#include "bvx/dyadic.hpp"
#include "bvx/grid.hpp"
#include "bvx/jump_measure.hpp"

namespace bvx {

/// M_D g(x): max over dyadic Q containing the cell of avg_Q |g|.
[[nodiscard]] GridFunction maximal_dyadic(const GridFunction& g);

/// Truncated maximal function M g(Q) = max over lattice cubes R containing Q
/// (R = Q included) of avg_R |g|, for every cube of `lattice`.
[[nodiscard]] std::vector<double> truncated_maximal(const GridFunction& g, const Lattice& lattice);

/// Truncated maximal function of a single dyadic cube on the full grid.
[[nodiscard]] double maximal_truncated(const GridFunction& g, const DyadicCube& q);

/// Per cell, max over lattice cubes containing the cell of avg |g|; for the
/// full lattice this is maximal_dyadic.
[[nodiscard]] GridFunction lattice_maximal(const GridFunction& g, const Lattice& lattice);

struct TruncatedMaximalSides {
    double lhs;
    double rhs;
};

/// lhs = |Q| / M g(Q), rhs = 4 * sum over cells of Q of cell volume / M g(x).
/// Throws std::domain_error when M g(Q) = 0.
[[nodiscard]] TruncatedMaximalSides truncated_maximal_check(const GridFunction& g, const DyadicCube& q);

/// Non-tangential maximal function over cones |y - x| < aperture * t, with
/// the vertex at each cell center. Whitney region W_Q meets the cone iff
/// dist(x, Q) < aperture * l(Q).
[[nodiscard]] GridFunction nontangential_max(const WhitneyFunction& f, double aperture);

/// N_D f(x): max of |f_Q| over lattice cubes containing the cell.
[[nodiscard]] GridFunction nontangential_max_dyadic(const WhitneyFunction& f);

/// C_D f(x): max over lattice cubes Q containing the cell of
/// |Q|^{-1} sum_{R in Q} |f_R| |W_R|.
[[nodiscard]] GridFunction carleson_dyadic(const WhitneyFunction& f);

enum class CarlesonMode { dyadic, brute };

/// Carleson functional of a measure. Dyadic: max over lattice cubes of the
/// normalized closed-box mass. Brute (n = 1 only): max over all grid-aligned
/// intervals containing the cell.
[[nodiscard]] GridFunction carleson_of_gradient(const JumpMeasure& mu, CarlesonMode mode);

/// n = 2 stand-in for the non-dyadic Carleson functional: max over cubes of
/// the standard grid and of the grids translated by (-1)^j/3 per axis subset.
[[nodiscard]] GridFunction carleson_shifted(const JumpMeasure& mu);

/// A_D f(x) = sum over lattice cubes containing the cell of |f_Q| l(Q).
[[nodiscard]] GridFunction area_dyadic(const WhitneyFunction& f);
/// Measure version: interface masses are attributed to adjacent Whitney
/// regions (vertical to the lower region, lateral split evenly) and the
/// resulting density is summed as above.
[[nodiscard]] GridFunction area_dyadic(const JumpMeasure& mu);

/// Cone integral of |f| t^{-n} dt dy over |y - x| < aperture t, vertex at
/// the cell center; exact piecewise for n = 1, Gauss quadrature for n = 2.
[[nodiscard]] GridFunction area_cone(const WhitneyFunction& f, double aperture);
[[nodiscard]] GridFunction area_cone(const JumpMeasure& mu, double aperture);

/// Whitney density |mu|(W_Q) / |W_Q| used by the measure area functionals.
[[nodiscard]] WhitneyFunction attributed_density(const JumpMeasure& mu);

struct ApertureRatios {
    double nontangential;
    double area;
};

/// ||N^(alpha) f||_p / ||N^(beta) f||_p and the same for A.
/// Throws std::domain_error when a denominator vanishes.
[[nodiscard]] ApertureRatios aperture_ratio_report(const WhitneyFunction& f, double alpha, double beta, double p);

struct DyadicRatios {
    double nontangential;
    double carleson;
    double area;
};

/// ||F f||_p / ||F_D f||_p for F in {N, C, A} at aperture 1.
[[nodiscard]] DyadicRatios dyadic_vs_nondyadic_report(const WhitneyFunction& f, double p);

}  // namespace bvx
