#pragma once

#include <cstddef>
#include <vector>

#include "bvx/dyadic.hpp"
#include "bvx/elliptic/envelopes.hpp"
#include "bvx/elliptic/families.hpp"
#include "bvx/elliptic/samples.hpp"
#include "bvx/elliptic/solution.hpp"
#include "bvx/grid.hpp"
#include "bvx/jump_measure.hpp"
#include "bvx/stopping.hpp"

namespace bvx::elliptic {

struct EllipticParams {
    /// Skip, aperture, delta', kappa'. The aperture is raised to 1/delta.
    GeometryConfig geometry = GeometryConfig::defaults(true);
    double eps = 0.25;
    double threshold = 2.0;  // principal-cube threshold, > 1
    int resolution = 4;      // Whitney sample lattice r x r
    /// Corkscrew parameter; 0 selects (eps / 10)^{1 / holder exponent}.
    double eta = 0.0;

    /// Throws ConfigError naming the offending field.
    void validate() const;
    [[nodiscard]] double resolved_eta(double holder) const;
};

/// Everything the construction produces for one solution (n = 1). Families
/// live on the skip lattice; `maximal` is M(Q) of Nu per skip cube.
struct EllipticRun {
    EllipticParams params;
    double eta;
    double eps_internal;  // eps / 2: stopping and oscillation thresholds
    WhitneySamples samples;
    GridFunction nu;              // Nu at cell centers
    std::vector<double> maximal;  // per skip cube
    GridFunction maximal_cells;   // max over skip cubes containing the cell
    StoppingFamily principal;
    StoppingFamily stopping;
    StoppingFamily oscillation;
    WhitneyFunction coarse;       // u(p_S) on each sawtooth of S
    std::vector<double> f;      // coarse + correction at every sample, aligned with samples.all()

    [[nodiscard]] const Lattice& lattice() const { return samples.lattice(); }
};

/// Throws ConfigError for invalid parameters, n != 1, or a depth below the skip.
[[nodiscard]] EllipticRun run_elliptic(const SolutionField& u, int depth, const EllipticParams& params);

/// Gradient of coarse as interface jumps on the skip lattice.
[[nodiscard]] JumpMeasure coarse_gradient(const EllipticRun& run);

/// Gradient of correction: per R, the interior mass of |grad u| over W_R plus the
/// jump |u - coarse(R)| across its boundary, both by composite Gauss quadrature
/// and placed as region masses.
[[nodiscard]] JumpMeasure correction_gradient(const EllipticRun& run, const SolutionField& u);

/// Interior integral of |grad u| over W_Q = [delta l, l) x Q.
[[nodiscard]] double whitney_gradient_mass(const SolutionField& u, const Lattice& lattice, const DyadicCube& q);

struct ApproximationReport {
    std::size_t cells = 0;
    std::size_t principal_size = 0;
    std::size_t stopping_size = 0;
    std::size_t oscillation_size = 0;
    double packing_principal = 0.0;
    double packing_stopping = 0.0;
    double packing_oscillation = 0.0;

    std::size_t sparse_violations = 0;
    double sparse_worst = 0.0;
    std::size_t principal_rule_violations = 0;  // owner falsity property
    std::size_t stopping_rule_violations = 0;
    ConeBoundResult cone_bound;
    CorkscrewJumpResult corkscrew_jump;

    // Closeness, per skip cube: sup_{W_Q} |f - u| / (eps M(Q)); per cell:
    // N(f - u)(x) / (eps M(Nu)(x)) over skip cubes containing x.
    double cube_ratio = 0.0;
    std::size_t cube_violations = 0;
    double cell_ratio = 0.0;
    std::size_t cell_violations = 0;

    double c_eps = 0.0;          // max over cells of C(grad f) / M(Nu)
    double coarse_mass = 0.0;
    double correction_mass = 0.0;
    double coarse_box_constant = 0.0;  // max over Q0 of |grad(1_box coarse)| / int_Q0 Nu
    double whitney_gradient_constant = 0.0;  // max over R of int_{W_R}|grad u| / (inf_R Nu |R|)
    double surface_constant = 0.0;  // max over S of H(boundary of the sawtooth) / |S|
    std::size_t overlap = 0;

    EnvelopeFeatures envelopes;
    double tent_lipschitz = 0.0;  // measured, largest over S; bound 1/delta
    double floor_lipschitz = 0.0;  // measured, largest over P; bound 1
};

[[nodiscard]] ApproximationReport approximation_report(const EllipticRun& run, const SolutionField& u);

/// Sum of one measure's interior terms inside each open Carleson box, with
/// vertical jumps charged to the parent cube and lateral faces to the lowest
/// common ancestor.
[[nodiscard]] std::vector<double> open_box_masses(const JumpMeasure& mu);

}  // namespace bvx::elliptic
