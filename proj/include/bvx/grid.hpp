#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "bvx/dyadic.hpp"

namespace bvx {

/// Real function on the boundary grid of side 2^{-J} over [0,1)^n, one value
/// per cell in lexicographic corner order.
class GridFunction {
public:
    GridFunction(int n, int depth);
    /// Throws ConfigError on length mismatch or non-finite entries.
    GridFunction(int n, int depth, std::vector<double> values);

    [[nodiscard]] int dim() const { return n_; }
    [[nodiscard]] int depth() const { return depth_; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] double cell_volume() const;
    [[nodiscard]] Lattice lattice() const { return Lattice::full(n_, depth_); }

    [[nodiscard]] std::span<const double> values() const& { return values_; }
    [[nodiscard]] std::span<double> values() & { return values_; }
    // A temporary hands over its storage so range-for over it stays valid.
    [[nodiscard]] std::vector<double> values() && { return std::move(values_); }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] double& operator[](std::size_t i) { return values_[i]; }

    /// Center of cell i along an axis.
    [[nodiscard]] double cell_center(std::size_t i, int axis) const;

    [[nodiscard]] bool same_shape(const GridFunction& other) const {
        return n_ == other.n_ && depth_ == other.depth_;
    }

private:
    int n_;
    int depth_;
    std::vector<double> values_;
};

/// (2^{-nJ} sum |v|^p)^{1/p} for p >= 1.
[[nodiscard]] double lp_norm(const GridFunction& g, double p);
[[nodiscard]] double integral(const GridFunction& g);
[[nodiscard]] double mean(const GridFunction& g);
[[nodiscard]] GridFunction operator-(const GridFunction& a, const GridFunction& b);
[[nodiscard]] GridFunction operator+(const GridFunction& a, const GridFunction& b);
[[nodiscard]] GridFunction operator*(double c, const GridFunction& a);

/// Averages of g (or |g|) over every cube of `lattice`, indexed by the
/// lattice's flat index. Computed by a bottom-up pass over all generations.
[[nodiscard]] std::vector<double> cube_averages(const GridFunction& g, const Lattice& lattice, bool absolute);

/// Real value per admissible cube of a lattice; represents a function that is
/// constant on each Whitney region of that lattice.
class WhitneyFunction {
public:
    explicit WhitneyFunction(Lattice lattice, double fill = 0.0);
    WhitneyFunction(Lattice lattice, std::vector<double> values);

    [[nodiscard]] const Lattice& lattice() const { return lattice_; }
    [[nodiscard]] std::span<const double> values() const& { return values_; }
    [[nodiscard]] std::span<double> values() & { return values_; }
    // A temporary hands over its storage so range-for over it stays valid.
    [[nodiscard]] std::vector<double> values() && { return std::move(values_); }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] double& operator[](std::size_t i) { return values_[i]; }
    [[nodiscard]] double at(const DyadicCube& q) const { return values_[lattice_.index(q)]; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }

private:
    Lattice lattice_;
    std::vector<double> values_;
};

[[nodiscard]] WhitneyFunction operator-(const WhitneyFunction& a, const WhitneyFunction& b);
[[nodiscard]] WhitneyFunction operator+(const WhitneyFunction& a, const WhitneyFunction& b);
[[nodiscard]] WhitneyFunction operator*(double c, const WhitneyFunction& a);

/// Text format: header line "n J", then 2^{nJ} values.
[[nodiscard]] GridFunction read_grid_function(std::istream& in);
void write_grid_function(std::ostream& out, const GridFunction& g);

/// Text format: header line "n J step", then one line "j k_1 .. k_n value" per cube.
[[nodiscard]] WhitneyFunction read_whitney_function(std::istream& in);
void write_whitney_function(std::ostream& out, const WhitneyFunction& f);

}  // namespace bvx
