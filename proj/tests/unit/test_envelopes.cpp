#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <random>

#include "bvx/elliptic/envelopes.hpp"
#include "bvx/elliptic/solution.hpp"
#include "bvx/experiment.hpp"
#include "oracles/dyadic_brute.hpp"
#include "oracles/cover_config.hpp"

namespace {

using bvx::DyadicCube;
using bvx::Lattice;
using bvx::StoppingFamily;
using namespace bvx::elliptic;

double interval_distance(double x, double lo, double hi) { return x < lo ? lo - x : (x > hi ? x - hi : 0.0); }

double brute(const LipschitzEnvelope& e, double x) {
    if (e.kind() == LipschitzEnvelope::Kind::tents) {
        double v = 0.0;
        for (const auto& p : e.pieces()) v = std::max(v, p.height - e.lipschitz() * interval_distance(x, p.lo, p.hi));
        return v;
    }
    double v = std::numeric_limits<double>::infinity();
    for (const auto& p : e.pieces()) v = std::min(v, p.height + e.lipschitz() * interval_distance(x, p.lo, p.hi));
    return v;
}

TEST(Envelope, SweepMatchesDirectFormula) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u01;
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<LipschitzEnvelope::Piece> pieces;
        const int m = 1 + trial % 9;
        for (int i = 0; i < m; ++i) {
            const double a = u01(rng), b = u01(rng);
            pieces.push_back({std::min(a, b), std::max(a, b), 0.3 * u01(rng)});
        }
        for (auto kind : {LipschitzEnvelope::Kind::tents, LipschitzEnvelope::Kind::cones}) {
            const LipschitzEnvelope e(kind, trial % 2 ? 1.0 : 16.0, pieces);
            std::vector<double> xs(300);
            for (double& x : xs) x = u01(rng);
            const auto vs = e.evaluate(xs);
            for (std::size_t i = 0; i < xs.size(); ++i) {
                EXPECT_NEAR(vs[i], brute(e, xs[i]), 1e-15);
                EXPECT_NEAR(e(xs[i]), brute(e, xs[i]), 1e-15);
            }
            EXPECT_LE(e.measured_lipschitz(10), e.lipschitz() * (1.0 + 1e-12));
        }
    }
    const LipschitzEnvelope none(LipschitzEnvelope::Kind::cones, 1.0, {});
    EXPECT_EQ(none(0.5), std::numeric_limits<double>::infinity());
}

StoppingFamily cover_family() {
    const oracle::CoverConfig fig;
    const Lattice lat = Lattice::skip(1, fig.depth, fig.skip);
    StoppingFamily f(lat);
    f.insert(0);
    for (const auto& c : fig.children()) f.insert(lat.index(c));
    return f;
}

TEST(Envelope, EmptyChildSetIsZero) {
    StoppingFamily f(Lattice::skip(1, 8, 4));
    f.insert(0);
    const auto tent = tent_envelope(f, 0, 1.0 / 16.0);
    for (double v : tent.sample(8).values()) EXPECT_EQ(v, 0.0);
}

TEST(Envelope, TentsAreExactOnUncoveredChildren) {
    const oracle::CoverConfig fig;
    const StoppingFamily f = cover_family();
    const auto tent = tent_envelope(f, 0, 1.0 / 16.0).sample(fig.depth);
    for (const auto& c : {fig.large, fig.small_free})
        for (std::size_t cell : oracle::cells_in(c, fig.depth)) EXPECT_DOUBLE_EQ(tent[cell], c.side());
    // The small child next to the large one sits under the large tent.
    for (std::size_t cell : oracle::cells_in(fig.small_covered, fig.depth)) EXPECT_GT(tent[cell], fig.small_covered.side());
    EXPECT_LE(tent_envelope(f, 0, 1.0 / 16.0).measured_lipschitz(fig.depth), 16.0);
}

TEST(Envelope, ThreeChildFeatures) {
    const oracle::CoverConfig fig;
    const StoppingFamily stopping = cover_family();
    StoppingFamily principal(stopping.lattice());
    principal.insert(0);
    const auto u = solve_poisson(bvx::experiment::generate_input(bvx::experiment::InputClass::random_smooth, 1, 8, 1));
    const WhitneySamples samples(stopping.lattice(), *u, 0.025, 4);
    const EnvelopeFeatures e = envelope_features(stopping, 0, principal, samples, 1.0 / 16.0, 1.0 / 32.0, 1.25);
    EXPECT_EQ(e.hidden_violations, 0U);
    EXPECT_EQ(e.uncovered_violations, 0U);
    EXPECT_EQ(e.covered_overwritten, 1U);
    EXPECT_EQ(e.order_violations, 0U);
    EXPECT_EQ(e.region_violations, 0U);
    EXPECT_GT(e.samples_checked, 0U);
}

TEST(Envelope, ConesAreOneLipschitzAndBelowTheSawtooth) {
    const Lattice lat = Lattice::skip(1, 12, 4);
    StoppingFamily p(lat);
    p.insert(0);
    p.insert(lat.index(DyadicCube{1, 4, {3, 0}}));
    p.insert(lat.index(DyadicCube{1, 8, {200, 0}}));
    const auto floor = sawtooth_floor(p, 0, 1.0 / 16.0);
    const auto star = expanded_floor(p, 0, 1.0 / 32.0, 1.25);
    EXPECT_LE(floor.measured_lipschitz(12), 1.0 + 1e-12);
    EXPECT_LE(star.measured_lipschitz(12), 1.0 + 1e-12);
    for (std::size_t q : sawtooth_cubes(p, 0)) {
        const DyadicCube c = lat.cube(q);
        if (c.j == lat.finest_generation()) continue;
        // W_Q lies above the graph of floor over Q.
        EXPECT_LE(floor(c.center(0)), c.side() / 16.0 + 1e-15);
    }
    const auto single = expanded_cone(DyadicCube{1, 2, {1, 0}}, 1.0 / 32.0, 1.25);
    // Height is delta' times the side of the expanded cube.
    EXPECT_DOUBLE_EQ(single(0.375), 1.25 * 0.25 / 32.0);
    EXPECT_DOUBLE_EQ(single(0.9), 1.25 * 0.25 / 32.0 + 0.9 - (0.375 + 0.125 * 1.25));
}

}  // namespace
