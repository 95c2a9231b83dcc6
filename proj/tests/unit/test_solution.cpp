#include <gtest/gtest.h>

#include <cmath>

#include "bvx/elliptic/coefficients.hpp"
#include "bvx/elliptic/solution.hpp"
#include "bvx/errors.hpp"
#include "bvx/experiment.hpp"
#include "oracles/harmonic.hpp"
#include "support.hpp"

namespace {

using bvx::GridFunction;
using namespace bvx::elliptic;

TEST(Poisson, ConstantsAreReproduced) {
    for (int n : {1, 2}) {
        const GridFunction g(n, 4, std::vector<double>(std::size_t{1} << (4 * n), 2.5));
        const auto u = solve_poisson(g);
        for (double t : {1e-3, 0.05, 0.7, 3.0}) {
            const double x[2] = {0.31, 0.77};
            EXPECT_NEAR(u->value(t, std::span<const double>(x, static_cast<std::size_t>(n))), 2.5, 1e-10);
        }
    }
}

TEST(Poisson, HalfIndicatorMatchesArctanFormula) {
    GridFunction g(1, 6);
    for (std::size_t c = 0; c < 32; ++c) g[c] = 1.0;
    const auto u = solve_poisson(g);
    double worst = 0.0;
    for (double t : {1e-4, 3e-3, 0.02, 0.1, 0.5, 1.5})
        for (double x : {0.0, 0.1, 0.25, 0.4999, 0.5, 0.73, 0.99})
            worst = std::max(worst, std::abs(u->value(t, x) - oracle::periodic_poisson(g, t, x)));
    EXPECT_LT(worst, 1e-6);
}

TEST(Poisson, RandomDataMatchesClosedFormAndGradient) {
    const GridFunction g = bvx::experiment::generate_input(bvx::experiment::InputClass::random_smooth, 1, 7, 3);
    const auto u = solve_poisson(g);
    for (double t : {2e-3, 0.03, 0.3})
        for (double x : {0.05, 0.5, 0.91}) {
            EXPECT_NEAR(u->value(t, x), oracle::periodic_poisson(g, t, x), 1e-6);
            const double h = 1e-6 * t;
            const auto grad = u->gradient(t, x);
            EXPECT_NEAR(grad[0], (u->value(t + h, x) - u->value(t - h, x)) / (2 * h), 1e-4 * (1.0 + std::abs(grad[0])));
            EXPECT_NEAR(grad[1], (u->value(t, x + h) - u->value(t, x - h)) / (2 * h), 1e-4 * (1.0 + std::abs(grad[1])));
        }
}

TEST(Poisson, LargeHeightsTendToTheMean) {
    const GridFunction g = testing_support::random_grid(1, 6, 8, false);
    const auto u = solve_poisson(g);
    const double m = bvx::mean(g);
    EXPECT_NEAR(u->value(4.0, 0.2), m, 1e-9);
    EXPECT_LT(std::abs(u->value(1.0, 0.2) - m), std::abs(u->value(0.1, 0.2) - m) + 1e-12);
}

TEST(Coefficients, EllipticityChecks) {
    const Matrix2 skew{1.0, 0.7, -0.7, 2.0};
    EXPECT_DOUBLE_EQ(symmetric_min_eigenvalue(skew), 1.0);
    EXPECT_GE(probe_ellipticity(skew), 1.0 - 1e-12);
    EXPECT_GE(operator_norm(skew), 2.0);
    EXPECT_THROW(EllipticCoefficients(1, std::vector<Matrix2>(2, Matrix2{1.0, 0.0, 0.0, -1.0})), bvx::ConfigError);
    const auto r = EllipticCoefficients::random(5, 3);
    EXPECT_GT(r.lambda(), 0.0);
    for (std::size_t i = 0; i < r.size(); ++i) EXPECT_GE(probe_ellipticity(r.cell(i)), r.lambda() * (1.0 - 1e-12));
}

TEST(Fd, ConstantsAreExact) {
    const GridFunction g(1, 5, std::vector<double>(32, -1.25));
    const FdSolution u(g, EllipticCoefficients::random(5, 1));
    for (std::size_t i = 0; i < u.nodes_per_side(); ++i)
        for (std::size_t j = 0; j < u.nodes_per_side(); ++j) EXPECT_NEAR(u.node_value(i, j), -1.25, 1e-12);
}

TEST(Fd, IdentityMatchesSlabCosineSeries) {
    const GridFunction g = bvx::experiment::generate_input(bvx::experiment::InputClass::random_smooth, 1, 6, 5);
    const FdSolution u(g, EllipticCoefficients::identity(6));
    EXPECT_LE(u.report().residual, 1e-10);
    double worst = 0.0;
    for (double t : {0.125, 0.25, 0.5, 0.75})
        for (double x : {0.0625, 0.3125, 0.5, 0.8125})
            worst = std::max(worst, std::abs(u.value(t, x) - oracle::slab_cosine(g, t, x)));
    EXPECT_LT(worst, 2e-3);
}

TEST(Fd, MaximumPrincipleAndEnergy) {
    const GridFunction g = testing_support::random_grid(1, 5, 12, false);
    const FdSolution u(g, EllipticCoefficients::random(5, 12));
    double lo = g[0], hi = g[0];
    for (double v : g.values()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (std::size_t i = 1; i < u.nodes_per_side(); ++i)
        for (std::size_t j = 0; j < u.nodes_per_side(); ++j) {
            EXPECT_GE(u.node_value(i, j), lo - 1e-12);
            EXPECT_LE(u.node_value(i, j), hi + 1e-12);
        }
    const FdReport& r = u.report();
    EXPECT_GT(r.energy, 0.0);
    EXPECT_NEAR(r.energy, r.boundary_pairing, 1e-8 * (1.0 + r.energy));
    EXPECT_LE(r.dirichlet_energy, r.energy / r.lambda * (1.0 + 1e-10));
}

TEST(Fd, RejectsMismatchedInput) {
    EXPECT_THROW(FdSolution(GridFunction(2, 2), EllipticCoefficients::identity(2)), bvx::ConfigError);
    EXPECT_THROW(FdSolution(GridFunction(1, 3), EllipticCoefficients::identity(4)), bvx::ConfigError);
}

}  // namespace
