#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bvx/dyadic.hpp"
#include "bvx/grid.hpp"
#include "bvx/stopping.hpp"

namespace bvx {

/// S g(x) = (sum over members Q containing x of |avg_Q g - avg_{Q_*} g|^2)^{1/2},
/// Q_* the stopping parent (Q itself at the roots).
[[nodiscard]] GridFunction stopped_square(const GridFunction& g, const StoppingFamily& family);

struct L2Sides {
    double lhs;  // ||S g||_2^2
    double rhs;  // ||g||_2^2
};
[[nodiscard]] L2Sides l2_bound_check(const GridFunction& g, const StoppingFamily& family);

/// u_k = avg_Q g on members Q of generation k, g elsewhere; k = 0..G, followed
/// by a final level equal to g.
[[nodiscard]] std::vector<GridFunction> martingale_sequence(const GridFunction& g, const StoppingFamily& family);

/// max over k of |int u_k u_{k+1} - int u_k^2| / max(int u_k^2, int g^2).
[[nodiscard]] double martingale_orthogonality_error(const std::vector<GridFunction>& levels);

struct WeakL1Probe {
    double measure;  // |{S g > lambda}|
    double bound;    // ||g||_1 / lambda
};
[[nodiscard]] WeakL1Probe weak_l1_probe(const GridFunction& g, const StoppingFamily& family, double lambda);

struct BadPart {
    std::size_t cube;  // flat index on the full lattice
    GridFunction b;    // supported on the cube, mean zero
};

struct CzDecomposition {
    GridFunction good;
    std::vector<BadPart> bad;
};

/// Calderon-Zygmund decomposition at height lambda: the selected cubes are the
/// maximal dyadic cubes with avg |g| > lambda. Off them |good| <= lambda, on
/// them |good| <= 2^n lambda unless the top cube itself is selected.
[[nodiscard]] CzDecomposition cz_decompose(const GridFunction& g, double lambda);

/// Positive weight; entries below 1e-15 are raised to it and counted.
struct Weight {
    GridFunction values;
    std::size_t clamped = 0;
};
[[nodiscard]] Weight make_weight(const GridFunction& raw);

/// sup over dyadic Q of avg_Q w * (avg_Q w^{1 - q'})^{q - 1}.
[[nodiscard]] double aq_characteristic(const Weight& w, double q);

struct WeightedSides {
    double lhs;  // ||S g||_{L_p(w)}
    double rhs;  // ||M_D g||_{L_p(w)}
};
[[nodiscard]] WeightedSides weighted_sf_check(const GridFunction& g, const StoppingFamily& family, const Weight& w,
                                              double p);

struct GoodLambdaSides {
    double lhs;  // w({S > 2 lambda, M_D g < gamma lambda})
    double rhs;  // w({S > lambda})
};
/// Requires 0 < gamma < 1/2.
[[nodiscard]] GoodLambdaSides good_lambda_probe(const GridFunction& g, const StoppingFamily& family, const Weight& w,
                                                double lambda, double gamma);

/// Every lattice cube joins independently with probability `density`.
[[nodiscard]] StoppingFamily random_family(const Lattice& lattice, double density, std::uint64_t seed);

}  // namespace bvx
