#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bvx/dyadic.hpp"
#include "bvx/elliptic/solution.hpp"
#include "bvx/grid.hpp"

namespace bvx::elliptic {

struct Sample {
    double t;
    double x;
    double u;
};

/// Cached solution values on the skip lattice (n = 1). Per cube Q:
///   - an r x r midpoint lattice of W_Q = [delta l, l) x Q,
///   - the corkscrew point p_Q = ((1 - eta) l, c_Q),
///   - five points of the top hypersurface {l} x eta Q.
/// Refining r by a factor of three keeps the old midpoints, so sampled
/// suprema can only grow.
class WhitneySamples {
public:
    WhitneySamples(const Lattice& lattice, const SolutionField& u, double eta, int resolution = 4);

    static constexpr std::size_t kTopPoints = 5;

    [[nodiscard]] const Lattice& lattice() const { return lattice_; }
    [[nodiscard]] int resolution() const { return resolution_; }
    [[nodiscard]] double eta() const { return eta_; }
    [[nodiscard]] std::size_t cubes() const { return lattice_.size(); }

    /// Region lattice plus the corkscrew point: the samples of W_Q.
    [[nodiscard]] std::span<const Sample> region(std::size_t cube) const;
    [[nodiscard]] const Sample& corkscrew(std::size_t cube) const { return samples_[base(cube) + per_region()]; }
    [[nodiscard]] std::span<const Sample> top(std::size_t cube) const;
    [[nodiscard]] std::span<const Sample> all() const { return samples_; }
    /// Owning cube of a flat sample index.
    [[nodiscard]] std::size_t cube_of(std::size_t sample) const { return sample / stride(); }
    /// True for samples that lie in W_Q (region lattice or corkscrew).
    [[nodiscard]] bool in_region(std::size_t sample) const { return sample % stride() <= per_region(); }

    /// sup - inf of u over the samples of W_Q.
    [[nodiscard]] double oscillation(std::size_t cube) const;

private:
    [[nodiscard]] std::size_t per_region() const {
        return static_cast<std::size_t>(resolution_) * static_cast<std::size_t>(resolution_);
    }
    [[nodiscard]] std::size_t stride() const { return per_region() + 1 + kTopPoints; }
    [[nodiscard]] std::size_t base(std::size_t cube) const { return cube * stride(); }

    Lattice lattice_;
    int resolution_;
    double eta_;
    std::vector<Sample> samples_;
};

/// Nu(x) at the boundary cell centers: max |u(z)| over samples z = (t, y)
/// with |y - x| < aperture * t. One range-max update per sample.
[[nodiscard]] GridFunction cone_maximal(const WhitneySamples& samples, double aperture);

struct ConeBoundResult {
    std::size_t violations = 0;
    double worst_ratio = 0.0;  // max of sup|u| / M over cubes with M > 0
    std::size_t checked = 0;   // (cube, sample) pairs inside the cone region
};

/// For every skip cube Q: sup |u| over the samples in
/// {t > delta l(Q) + dist(y, Q)} against `maximal[Q]`. Only samples whose own
/// cube is at least as large as Q and within its side length can qualify,
/// so the scan visits a few cubes per generation.
[[nodiscard]] ConeBoundResult cone_bound_check(const WhitneySamples& samples, std::span<const double> maximal);

/// Largest number of expanded regions [delta' l, kappa' l) x kappa' R, R in the
/// lattice, containing any single sample point.
[[nodiscard]] std::size_t max_overlap(const WhitneySamples& samples, double delta_prime, double kappa_prime);

}  // namespace bvx::elliptic
