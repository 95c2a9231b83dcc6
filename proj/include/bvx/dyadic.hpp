#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bvx {

inline constexpr int kMaxDim = 2;

/// Half-open cube 2^{-j}([0,1)^n + k) inside the unit cube.
struct DyadicCube {
    int n = 1;
    int j = 0;
    std::array<std::uint32_t, kMaxDim> k{0, 0};

    [[nodiscard]] static DyadicCube unit(int n) { return DyadicCube{n, 0, {0, 0}}; }

    [[nodiscard]] double side() const { return std::ldexp(1.0, -j); }
    [[nodiscard]] double volume() const { return std::ldexp(1.0, -n * j); }
    [[nodiscard]] double lower(int axis) const { return std::ldexp(static_cast<double>(k[axis]), -j); }
    [[nodiscard]] double upper(int axis) const { return std::ldexp(static_cast<double>(k[axis]) + 1.0, -j); }
    [[nodiscard]] double center(int axis) const { return std::ldexp(static_cast<double>(k[axis]) + 0.5, -j); }

    /// Ancestor at generation g <= j (the cube itself when g == j).
    [[nodiscard]] DyadicCube ancestor_at(int g) const;
    /// Inclusive containment of half-open cubes.
    [[nodiscard]] bool contains(const DyadicCube& other) const;
    [[nodiscard]] bool valid() const;

    friend bool operator==(const DyadicCube&, const DyadicCube&) = default;
};

/// The 2^n children of q. Throws std::out_of_range when q.j >= depth.
[[nodiscard]] std::vector<DyadicCube> children(const DyadicCube& q, int depth);
[[nodiscard]] DyadicCube child(const DyadicCube& q, unsigned which);
/// Throws std::out_of_range for the unit cube.
[[nodiscard]] DyadicCube parent(const DyadicCube& q);
/// Strict ancestors ordered from the parent up to the unit cube.
[[nodiscard]] std::vector<DyadicCube> ancestors(const DyadicCube& q);
/// Cubes of the same generation whose closures meet the closure of q.
[[nodiscard]] std::vector<DyadicCube> same_scale_neighbors(const DyadicCube& q);

/// Euclidean distance between the closures of two cubes.
[[nodiscard]] double distance(const DyadicCube& a, const DyadicCube& b);
/// Euclidean distance from a point to the closure of q.
[[nodiscard]] double distance(const DyadicCube& q, std::span<const double> x);

/// The skip grid keeps generations that are multiples of `skip`, so delta = 2^{-skip}.
struct SkipGrid {
    int depth = 0;
    int skip = 1;

    [[nodiscard]] double delta() const { return std::ldexp(1.0, -skip); }
    [[nodiscard]] bool admissible(int generation) const {
        return generation >= 0 && generation <= depth && generation % skip == 0;
    }
    [[nodiscard]] int finest_generation() const { return (depth / skip) * skip; }
};

/// Skip-grid ancestor one admissible generation up. Throws std::out_of_range
/// at generation 0 and std::invalid_argument for a non-admissible generation.
[[nodiscard]] DyadicCube skip_parent(const DyadicCube& q, const SkipGrid& grid);

/// Q' lies in the concentric shrink (1 - 2a)Q, a = margin fraction of l(Q).
[[nodiscard]] bool inside_shrunk(const DyadicCube& inner, const DyadicCube& outer, double margin_fraction);
/// Q' misses (1 - 2a)Q entirely.
[[nodiscard]] bool outside_shrunk(const DyadicCube& inner, const DyadicCube& outer, double margin_fraction);

/// Geometric parameters shared by all modules. Defaults: skip 4, margin 6,
/// c0 = 2, c1 = 1, kappa' = 1.25, delta' = delta/2, theta = 1 - 2 delta.
struct GeometryConfig {
    double aperture = 1.0;
    double c0 = 2.0;
    double c1 = 1.0;
    int margin = 6;
    int skip = 4;
    double holder = 1.0;
    double eta = 0.025;
    double delta_prime = 1.0 / 32.0;
    double kappa_prime = 1.25;
    double theta = 1.0 - 2.0 / 16.0;
    bool elliptic = false;

    [[nodiscard]] double delta() const { return std::ldexp(1.0, -skip); }
    /// Throws ConfigError naming the offending field.
    void validate() const;

    /// Defaults with the aperture raised to max(1, 1/delta) when `elliptic`;
    /// the margin shrinks on coarse skips so that 2 * margin * delta < 1.
    [[nodiscard]] static GeometryConfig defaults(bool elliptic, int skip = 4);
};

/// Flat indexing of all admissible cubes of one grid convention: generations
/// 0, s, 2s, ... up to the depth J, where s = 1 for the full dyadic grid and
/// s = N_skip for the skip grid. Cells of the boundary grid sit at generation J.
class Lattice {
public:
    Lattice(int n, int depth, int step = 1);

    [[nodiscard]] static Lattice full(int n, int depth) { return Lattice(n, depth, 1); }
    [[nodiscard]] static Lattice skip(int n, int depth, int skip) { return Lattice(n, depth, skip); }

    [[nodiscard]] int dim() const { return n_; }
    [[nodiscard]] int depth() const { return depth_; }
    [[nodiscard]] int step() const { return step_; }
    [[nodiscard]] bool is_full() const { return step_ == 1; }
    [[nodiscard]] int levels() const { return levels_; }
    [[nodiscard]] int generation(int level) const { return level * step_; }
    [[nodiscard]] int finest_generation() const { return (levels_ - 1) * step_; }
    [[nodiscard]] std::size_t level_offset(int level) const { return offsets_[static_cast<std::size_t>(level)]; }
    [[nodiscard]] std::size_t level_size(int level) const { return std::size_t{1} << (n_ * generation(level)); }
    [[nodiscard]] std::size_t size() const { return offsets_.back(); }
    [[nodiscard]] std::size_t cell_count() const { return std::size_t{1} << (n_ * depth_); }
    [[nodiscard]] int level_of(std::size_t index) const;

    [[nodiscard]] bool admissible(const DyadicCube& q) const;
    [[nodiscard]] std::size_t index(const DyadicCube& q) const;
    [[nodiscard]] DyadicCube cube(std::size_t index) const;
    [[nodiscard]] std::size_t local_index(const DyadicCube& q) const;

    /// Flat index of the level-`level` cube containing boundary cell `cell`.
    [[nodiscard]] std::size_t cell_ancestor(std::size_t cell, int level) const;
    /// Cube of the boundary grid for a cell index.
    [[nodiscard]] DyadicCube cell_cube(std::size_t cell) const;
    /// Flat index of the parent one level up; requires level_of(index) > 0.
    [[nodiscard]] std::size_t parent_index(std::size_t index) const;
    /// Flat indices of the children one level down, in lexicographic order.
    [[nodiscard]] std::vector<std::size_t> child_indices(std::size_t index) const;
    /// Flat index of the lowest common lattice ancestor.
    [[nodiscard]] std::size_t common_ancestor(std::size_t a, std::size_t b) const;

    /// Whitney region t-extent: [2^{-s} l, l) for step s.
    [[nodiscard]] double whitney_bottom(const DyadicCube& q) const { return std::ldexp(q.side(), -step_); }
    [[nodiscard]] double whitney_fraction() const { return 1.0 - std::ldexp(1.0, -step_); }
    [[nodiscard]] double whitney_volume(const DyadicCube& q) const { return whitney_fraction() * q.side() * q.volume(); }

    friend bool operator==(const Lattice& a, const Lattice& b) {
        return a.n_ == b.n_ && a.depth_ == b.depth_ && a.step_ == b.step_;
    }

private:
    int n_;
    int depth_;
    int step_;
    int levels_;
    std::vector<std::size_t> offsets_;
};

/// Whitney box above a lattice cube.
struct WhitneyRegion {
    DyadicCube cube;
    double t_low = 0.0;
    double t_high = 0.0;

    [[nodiscard]] double volume() const { return (t_high - t_low) * cube.volume(); }
};

[[nodiscard]] WhitneyRegion whitney_region(const Lattice& lattice, const DyadicCube& q);

}  // namespace bvx
