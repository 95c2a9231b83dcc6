#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "bvx/functionals.hpp"
#include "bvx/elliptic/approximant.hpp"
#include "bvx/elliptic/families.hpp"
#include "bvx/elliptic/samples.hpp"
#include "bvx/errors.hpp"
#include "bvx/experiment.hpp"
#include "oracles/dyadic_brute.hpp"
#include "oracles/cover_config.hpp"

namespace {

using bvx::DyadicCube;
using bvx::GridFunction;
using bvx::Lattice;
using bvx::StoppingFamily;
using bvx::experiment::InputClass;
using namespace bvx::elliptic;

std::set<std::size_t> members_of(const StoppingFamily& f) { return {f.cube_indices().begin(), f.cube_indices().end()}; }

EllipticRun run_for(const GridFunction& g, const EllipticParams& params = {}) {
    const auto u = solve_poisson(g);
    return run_elliptic(*u, g.depth(), params);
}

TEST(Principal, ConstantDataGiveTheTopCubeOnly) {
    const EllipticRun r = run_for(GridFunction(1, 8, std::vector<double>(256, 3.0)));
    EXPECT_EQ(r.principal.size(), 1U);
    EXPECT_EQ(members_of(r.stopping), members_of(r.principal));
    EXPECT_EQ(r.oscillation.size(), 0U);
}

TEST(Principal, SpikeMatchesDefinition) {
    const GridFunction g = bvx::experiment::generate_input(InputClass::spike, 1, 8, 4);
    const EllipticRun r = run_for(g);
    const Lattice& lat = r.lattice();
    const PrincipalRule rule{r.maximal, 2.0};
    EXPECT_EQ(members_of(r.principal), oracle::stopping_family(lat, {0}, rule));
    EXPECT_GT(r.principal.size(), 1U);
    EXPECT_EQ(owner_rule_violations(r.principal, rule), 0U);
}

TEST(Principal, SparseCertificateOnRandomData) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const InputClass c = seed % 2 ? InputClass::random : InputClass::spike;
        const EllipticRun r = run_for(bvx::experiment::generate_input(c, 1, 8, seed));
        const SparseCertificate cert = sparse_certificate(r.principal, 2.0);
        EXPECT_EQ(cert.violations, 0U) << seed;
        EXPECT_LE(cert.worst, 1.0);
    }
}

TEST(Stopping, MatchesDefinitionAndFalsityProperty) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const GridFunction g = bvx::experiment::generate_input(InputClass::haar, 1, 8, seed);
        const EllipticRun r = run_for(g);
        const CorkscrewRule rule{&r.samples, r.maximal, r.eps_internal};
        const std::vector<std::size_t> initial(r.principal.cube_indices().begin(), r.principal.cube_indices().end());
        EXPECT_EQ(members_of(r.stopping), oracle::stopping_family(r.lattice(), initial, rule));
        EXPECT_EQ(owner_rule_violations(r.stopping, rule), 0U);
        for (std::size_t m : initial) EXPECT_TRUE(r.stopping.contains(m));
    }
}

TEST(Stopping, RejectsLargeEta) {
    const GridFunction g = bvx::experiment::generate_input(InputClass::random, 1, 8, 1);
    EllipticParams p;
    p.eta = 0.2;
    EXPECT_THROW((void)run_for(g, p), bvx::ConfigError);
}

TEST(Oscillation, FiresNearJumpsAndGrowsUnderRefinement) {
    GridFunction step(1, 8);
    for (std::size_t c = 0; c < 128; ++c) step[c] = 1.0;
    const EllipticRun r = run_for(step);
    ASSERT_GT(r.oscillation.size(), 0U);
    for (std::size_t i = 0; i < r.oscillation.size(); ++i) {
        const DyadicCube q = r.oscillation.cube(i);
        // Periodic data: the step jumps at 1/2 and again across x = 0 = 1.
        const double d = std::min({q.lower(0), std::abs(q.center(0) - 0.5) - 0.5 * q.side(), 1.0 - q.upper(0)});
        EXPECT_LE(d, 2.0 * q.side());
    }
    const auto u = solve_poisson(bvx::experiment::generate_input(InputClass::random_smooth, 1, 8, 2));
    const Lattice lat = Lattice::skip(1, 8, 4);
    const WhitneySamples coarse(lat, *u, 0.025, 4);
    const WhitneySamples fine(lat, *u, 0.025, 12);
    for (std::size_t q = 0; q < lat.size(); ++q) EXPECT_GE(fine.oscillation(q), coarse.oscillation(q));
}

TEST(Samples, ConeMaximalDominatesCorkscrews) {
    const auto u = solve_poisson(bvx::experiment::generate_input(InputClass::haar, 1, 8, 6));
    const Lattice lat = Lattice::skip(1, 8, 4);
    const WhitneySamples s(lat, *u, 0.025, 4);
    const GridFunction nu = cone_maximal(s, 16.0);
    for (std::size_t q = 0; q < lat.size(); ++q) {
        const DyadicCube c = lat.cube(q);
        for (std::size_t cell : oracle::cells_in(c, 8)) EXPECT_GE(nu[cell], std::abs(s.corkscrew(q).u));
    }
    const auto m = bvx::truncated_maximal(nu, lat);
    EXPECT_EQ(cone_bound_check(s, m).violations, 0U);
}

TEST(Uncovered, SingleMember) {
    const DyadicCube q = DyadicCube::unit(1);
    const DyadicCube inside{1, 4, {5, 0}};
    const auto a = uncovered_filter(q, std::span<const DyadicCube>(&inside, 1), 1.0 / 16.0, 6);
    EXPECT_EQ(a.selected, std::vector<std::size_t>{0});
    EXPECT_FALSE(a.covered[0]);
    const DyadicCube edge{1, 4, {0, 0}};
    const auto b = uncovered_filter(q, std::span<const DyadicCube>(&edge, 1), 1.0 / 16.0, 6);
    EXPECT_TRUE(b.selected.empty());
    EXPECT_FALSE(b.covered[0]);
    EXPECT_TRUE(b.holds());
}

TEST(Uncovered, CoverConfiguration) {
    const oracle::CoverConfig fig;
    const auto kids = fig.children();
    const auto r = uncovered_filter(fig.top, kids, 1.0 / 16.0, 6);
    EXPECT_EQ(r.selected, (std::vector<std::size_t>{1, 2}));
    EXPECT_TRUE(r.covered[0]);
    EXPECT_EQ(r.chains[0], (std::vector<std::size_t>{0, 1}));
    EXPECT_TRUE(r.holds());
}

TEST(Uncovered, ChainsIncreaseAndVolumeInequalityHolds) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        // Random disjoint skip-grid cubes strictly inside the unit cube.
        std::vector<DyadicCube> members;
        for (int a = 0; a < 12; ++a) {
            const int j = 4 * (1 + static_cast<int>(rng() % 3));
            const DyadicCube c{1, j, {static_cast<std::uint32_t>(rng() % (1U << j)), 0}};
            bool disjoint = true;
            for (const auto& m : members) disjoint = disjoint && !m.contains(c) && !c.contains(m);
            if (disjoint) members.push_back(c);
        }
        const auto r = uncovered_filter(DyadicCube::unit(1), members, 1.0 / 16.0, 6);
        EXPECT_TRUE(r.holds());
        for (const auto& chain : r.chains)
            for (std::size_t i = 1; i < chain.size(); ++i) EXPECT_GT(members[chain[i]].side(), members[chain[i - 1]].side());
    }
    const DyadicCube big{1, 1, {0, 0}};
    const DyadicCube nested{1, 2, {0, 0}};
    const std::array<DyadicCube, 2> overlap{big, nested};
    EXPECT_THROW((void)uncovered_filter(DyadicCube::unit(1), overlap, 1.0 / 16.0, 6), bvx::ConfigError);
}

}  // namespace
