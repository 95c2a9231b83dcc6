#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bvx/dyadic.hpp"
#include "bvx/elliptic/samples.hpp"
#include "bvx/grid.hpp"
#include "bvx/stopping.hpp"

namespace bvx::elliptic {

/// Lipschitz function on [0, 1] (n = 1) given by finitely many intervals:
///   tents: max(0, max_i (height_i - slope * dist(x, I_i)))
///   cones: min_i (height_i + slope * dist(x, I_i))
/// An empty cone family is +infinity.
class LipschitzEnvelope {
public:
    enum class Kind { tents, cones };

    struct Piece {
        double lo;
        double hi;
        double height;
    };

    LipschitzEnvelope(Kind kind, double slope, std::vector<Piece> pieces);

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] double lipschitz() const { return slope_; }
    [[nodiscard]] const std::vector<Piece>& pieces() const { return pieces_; }
    [[nodiscard]] double operator()(double x) const;
    /// Values at arbitrary points in one sweep, O((m + k) log m) for m pieces.
    [[nodiscard]] std::vector<double> evaluate(std::span<const double> xs) const;
    /// Values at the cell centers of the depth-J boundary grid.
    [[nodiscard]] GridFunction sample(int depth) const;
    /// Largest |e(x_{i+1}) - e(x_i)| / h over adjacent cell centers.
    [[nodiscard]] double measured_lipschitz(int depth) const;

private:
    Kind kind_;
    double slope_;
    std::vector<Piece> pieces_;
};

/// Sup of tents of height l(S') and slope 1/delta over the stopping
/// children S' of member `s`.
[[nodiscard]] LipschitzEnvelope tent_envelope(const StoppingFamily& stopping, std::size_t s, double delta);

/// Lattice cubes whose minimal containing member of `principal` is member `p`.
[[nodiscard]] std::vector<std::size_t> sawtooth_cubes(const StoppingFamily& principal, std::size_t p);

/// Inf over the sawtooth cubes Q of `p` of delta l(Q) + dist(x, Q). Cubes on
/// the finest lattice generation get height 0: their descendants below the grid
/// would continue the infimum down to the boundary.
[[nodiscard]] LipschitzEnvelope sawtooth_floor(const StoppingFamily& principal, std::size_t p, double delta);

/// delta' l(R*) + dist(x, R*), where R* is the concentric cube of side
/// kappa' l(R).
[[nodiscard]] LipschitzEnvelope expanded_cone(const DyadicCube& r, double delta_prime, double kappa_prime);

/// Inf of expanded_cone over the sawtooth cubes of `p`, with the same
/// finest-generation convention as sawtooth_floor.
[[nodiscard]] LipschitzEnvelope expanded_floor(const StoppingFamily& principal, std::size_t p, double delta_prime,
                                              double kappa_prime);

struct EnvelopeFeatures {
    std::size_t hidden_violations = 0;     // cells of a child S' where the tent envelope is below l(S')
    std::size_t uncovered_violations = 0;  // cells of an uncovered child where it differs from l(S')
    std::size_t covered_overwritten = 0;   // cells of a covered child where it differs from l(S')
    std::size_t order_violations = 0;      // cells of S where it is below the sawtooth floor
    std::size_t region_violations = 0;     // sawtooth samples not strictly above both floors
    std::size_t cells_checked = 0;
    std::size_t samples_checked = 0;
};

/// Cell checks for stopping member `s` on the depth-J cells of its cube,
/// against the sawtooth floor of its principal owner. When the cube of `s` is
/// itself principal, also the sample check on the Whitney samples of that
/// sawtooth, so a sweep over all of `stopping` checks every principal member
/// once.
[[nodiscard]] EnvelopeFeatures envelope_features(const StoppingFamily& stopping, std::size_t s,
                                                 const StoppingFamily& principal, const WhitneySamples& samples,
                                                 double delta, double delta_prime, double kappa_prime);

}  // namespace bvx::elliptic
