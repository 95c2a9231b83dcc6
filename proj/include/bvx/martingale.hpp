#pragma once

#include <cstddef>
#include <vector>

#include "bvx/dyadic.hpp"
#include "bvx/grid.hpp"
#include "bvx/jump_measure.hpp"
#include "bvx/stopping.hpp"

namespace bvx {

/// u_Q = avg_Q g for every cube of the full lattice.
[[nodiscard]] WhitneyFunction dyadic_average_extension(const GridFunction& g);

/// g = mean_zero + constant with constant = avg g; `extension` is that
/// constant on every Whitney region of the top box.
struct Localized {
    GridFunction mean_zero;
    GridFunction constant;
    WhitneyFunction extension;
    double mean = 0.0;
};
[[nodiscard]] Localized localize(const GridFunction& g);

/// Stopping test shared by every Thm-2 style construction: R stops under Q
/// iff |u_R - u_Q| >= eps * M(R) and M(R) > 0, M the truncated maximal function.
struct AverageStopRule {
    const WhitneyFunction* averages;
    const std::vector<double>* maximal;
    double eps;

    [[nodiscard]] bool operator()(std::size_t candidate, std::size_t member) const;
};

/// Maximal strict descendants R of Q (flat indices) meeting the stopping test.
[[nodiscard]] std::vector<std::size_t> stopping_children(const DyadicCube& q, const WhitneyFunction& u,
                                                         const GridFunction& g, double eps);

/// Stopping generations under the top cube. Requires mean-zero g.
[[nodiscard]] StoppingFamily build_generations(const GridFunction& g, double eps);

struct ApproximationReport {
    double eps = 0.0;
    double p = 2.0;
    /// max over cells of N_D(f - u) / M_D g (cells where M_D g = 0 are skipped).
    double closeness = 0.0;
    /// max over cells of C_D(d_t f) / (eps^{-1} M_D(M_D g)).
    double carleson_vertical = 0.0;
    /// Same with the full gradient.
    double carleson_full = 0.0;
    /// L_p versions of the three ratios.
    double closeness_norm = 0.0;
    double carleson_vertical_norm = 0.0;
    double carleson_full_norm = 0.0;
    /// Mass excluded from Carleson sums at the top of the box.
    double outer_top = 0.0;
    std::size_t members = 0;
    int generations = 0;
};

struct Approximant {
    WhitneyFunction f;
    WhitneyFunction u;
    StoppingFamily family;
    ApproximationReport report;
};

/// f_R = u_Q for R in the sawtooth of the stopping cube Q. Requires mean-zero
/// g (|avg g| at rounding level); throws std::invalid_argument otherwise.
[[nodiscard]] Approximant build_approximant(const GridFunction& g, double eps, double p = 2.0);

/// Pointwise ratios only; used when the full report is not needed.
[[nodiscard]] ApproximationReport approximation_report(const GridFunction& g, const WhitneyFunction& f,
                                                       const WhitneyFunction& u, double eps, double p);

struct BoxJumpSides {
    double lateral;
    double vertical;
    double boundary;
};

/// Lateral and vertical masses of grad f inside the closed box over Q, and
/// |Q| times the sum of |f| over the same-scale neighbors of Q.
[[nodiscard]] BoxJumpSides box_jump_report(const WhitneyFunction& f, const DyadicCube& q);

struct LacunaryReport {
    int k = 0;
    double l2_norm = 0.0;
    double min_carleson = 0.0;
};

/// Sum over dyadic Q of generation <= k of (1 on the left child, -1 on the
/// right child). Requires k < depth so the children exist; throws
/// std::invalid_argument otherwise.
[[nodiscard]] GridFunction lacunary_function(int k, int depth);
[[nodiscard]] LacunaryReport lacunary_report(int k, int depth);

}  // namespace bvx
