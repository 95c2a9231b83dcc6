#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "bvx/dyadic.hpp"
#include "bvx/grid.hpp"

namespace bvx {

/// Interface at t = l(child) over the child cube, between the child's Whitney
/// region and its lattice parent's.
struct VerticalJump {
    std::size_t child;
    double mass;
};

/// Face between two same-generation cubes; `high` is the neighbor of `low` in
/// the +axis direction. The face spans the Whitney t-range of that generation.
struct LateralJump {
    std::size_t low;
    std::size_t high;
    int axis;
    double mass;
};

/// Mass spread uniformly over the closed Whitney region of a cube.
struct RegionMass {
    std::size_t cube;
    double mass;
};

/// Closed box [0, t_top] x prod_i [lo_i, hi_i].
struct ClosedBox {
    double t_top = 0.0;
    std::array<double, kMaxDim> lo{0.0, 0.0};
    std::array<double, kMaxDim> hi{0.0, 0.0};
};

/// Gradient of a Whitney-constant function (or any finite measure carried by
/// Whitney interfaces and regions). Jumps across the boundary of the top box
/// are kept apart in `outer_top`/`outer_lateral` and never enter Carleson sums.
/// Nothing is recorded below the finest generation.
struct JumpMeasure {
    Lattice lattice;
    std::vector<VerticalJump> vertical;
    std::vector<LateralJump> lateral;
    std::vector<RegionMass> region;
    double outer_top = 0.0;
    double outer_lateral = 0.0;

    explicit JumpMeasure(Lattice lat) : lattice(lat) {}

    [[nodiscard]] double vertical_total() const;
    [[nodiscard]] double lateral_total() const;
    [[nodiscard]] double region_total() const;
    [[nodiscard]] double interior_total() const { return vertical_total() + lateral_total() + region_total(); }
};

enum class GradientPart { full, vertical, lateral };

/// Interface masses |f_Q' - f_Q| |Q'| (vertical) and |f_R - f_S| h l^{n-1}
/// (lateral, h the Whitney thickness) for every interior interface; zero
/// jumps are dropped.
[[nodiscard]] JumpMeasure gradient_measure(const WhitneyFunction& f, GradientPart part = GradientPart::full);

/// Region masses |f_R| |W_R|; its Carleson functional is C_D f.
[[nodiscard]] JumpMeasure region_measure(const WhitneyFunction& f);

/// Sum of two measures on the same lattice.
[[nodiscard]] JumpMeasure merge(const JumpMeasure& a, const JumpMeasure& b);

/// Mass of the interior terms inside a closed box; faces and regions are
/// treated as carrying uniform density.
[[nodiscard]] double closed_box_mass(const JumpMeasure& mu, const ClosedBox& box);

/// Mass inside the closed Carleson box of every lattice cube, by one
/// bottom-up pass. Vertical terms count for Q iff child is inside Q, regions
/// iff their cube is, and a lateral face iff either side is inside Q.
[[nodiscard]] std::vector<double> carleson_box_masses(const JumpMeasure& mu);

[[nodiscard]] ClosedBox carleson_box(const DyadicCube& q);

}  // namespace bvx
