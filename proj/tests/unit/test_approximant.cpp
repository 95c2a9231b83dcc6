#include <gtest/gtest.h>

#include <cmath>

#include "bvx/elliptic/approximant.hpp"
#include "bvx/elliptic/probes.hpp"
#include "bvx/errors.hpp"
#include "bvx/experiment.hpp"
#include "oracles/dyadic_brute.hpp"

namespace {

using bvx::DyadicCube;
using bvx::GridFunction;
using bvx::Lattice;
using bvx::experiment::InputClass;
using namespace bvx::elliptic;

GridFunction smooth(int depth, std::uint64_t seed) {
    return bvx::experiment::generate_input(InputClass::random_smooth, 1, depth, seed);
}

TEST(EllipticParams, Validation) {
    EllipticParams p;
    p.eps = 1.0;
    EXPECT_THROW(p.validate(), bvx::ConfigError);
    p = {};
    p.threshold = 1.0;
    EXPECT_THROW(p.validate(), bvx::ConfigError);
    p = {};
    EXPECT_DOUBLE_EQ(p.resolved_eta(1.0), 0.025);
    EXPECT_DOUBLE_EQ(p.resolved_eta(0.5), 0.025 * 0.025);
    const auto u = solve_poisson(smooth(3, 1));
    EXPECT_THROW((void)run_elliptic(*u, 3, p), bvx::ConfigError);
}

TEST(EllipticRun, ConstantDataAreReproduced) {
    const auto u = solve_poisson(GridFunction(1, 8, std::vector<double>(256, 2.0)));
    const EllipticRun run = run_elliptic(*u, 8, {});
    for (std::size_t i = 0; i < run.f.size(); ++i) EXPECT_NEAR(run.f[i], run.samples.all()[i].u, 1e-9);
    const ApproximationReport r = approximation_report(run, *u);
    EXPECT_EQ(r.cube_violations, 0U);
    EXPECT_EQ(r.cell_violations, 0U);
    EXPECT_EQ(r.correction_mass, 0.0);
    EXPECT_LT(r.cube_ratio, 1e-6);
}

TEST(EllipticRun, SawtoothValuesAreCorkscrewValues) {
    const auto u = solve_poisson(smooth(8, 2));
    const EllipticRun run = run_elliptic(*u, 8, {});
    const Lattice& lat = run.lattice();
    for (std::size_t q = 0; q < lat.size(); ++q) {
        const auto o = run.stopping.owner(q);
        ASSERT_GE(o, 0);
        EXPECT_EQ(run.coarse[q], run.samples.corkscrew(run.stopping.cube_index(static_cast<std::size_t>(o))).u);
    }
    const auto all = run.samples.all();
    for (std::size_t i = 0; i < all.size(); ++i) {
        const std::size_t q = run.samples.cube_of(i);
        const double expected = run.oscillation.contains(q) ? all[i].u : run.coarse[q];
        EXPECT_EQ(run.f[i], expected);
    }
}

TEST(EllipticRun, ReportContractsOnRandomData) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto u = solve_poisson(smooth(8, seed));
        const EllipticRun run = run_elliptic(*u, 8, {});
        const ApproximationReport r = approximation_report(run, *u);
        EXPECT_EQ(r.cube_violations, 0U);
        EXPECT_EQ(r.cell_violations, 0U);
        EXPECT_LE(r.cube_ratio, 1.0);
        EXPECT_EQ(r.sparse_violations, 0U);
        EXPECT_EQ(r.principal_rule_violations, 0U);
        EXPECT_EQ(r.stopping_rule_violations, 0U);
        EXPECT_EQ(r.cone_bound.violations, 0U);
        EXPECT_EQ(r.envelopes.hidden_violations, 0U);
        EXPECT_EQ(r.envelopes.uncovered_violations, 0U);
        EXPECT_EQ(r.envelopes.order_violations, 0U);
        EXPECT_EQ(r.envelopes.region_violations, 0U);
        EXPECT_LE(r.tent_lipschitz, 16.0 * (1.0 + 1e-12));
        EXPECT_LE(r.floor_lipschitz, 1.0 + 1e-12);
        EXPECT_TRUE(std::isfinite(r.c_eps));
        EXPECT_TRUE(std::isfinite(r.surface_constant));
        EXPECT_GT(r.overlap, 0U);
    }
}

TEST(EllipticRun, SurfaceOfASingleSawtooth) {
    // Constant data: one sawtooth, the whole truncated box. Its boundary is the
    // top (1), the two sides (1 - h/2 each, h the finest side) and the finest
    // bottoms (1), all over |S| = 1.
    const auto u = solve_poisson(GridFunction(1, 8, std::vector<double>(256, 1.0)));
    const EllipticRun run = run_elliptic(*u, 8, {});
    const ApproximationReport r = approximation_report(run, *u);
    const double bottom = run.lattice().whitney_bottom(DyadicCube{1, 8, {0, 0}});
    EXPECT_NEAR(r.surface_constant, 1.0 + 2.0 * (1.0 - bottom) + 1.0, 1e-12);
}

TEST(OpenBoxes, MatchesDirectAttribution) {
    const auto u = solve_poisson(smooth(8, 5));
    const EllipticRun run = run_elliptic(*u, 8, {});
    const bvx::JumpMeasure mu = bvx::merge(coarse_gradient(run), correction_gradient(run, *u));
    const auto boxes = open_box_masses(mu);
    const Lattice& lat = mu.lattice;
    for (std::size_t q = 0; q < lat.size(); ++q) {
        const DyadicCube c = lat.cube(q);
        double s = 0.0;
        for (const auto& v : mu.vertical)
            if (oracle::contains(c, lat.cube(lat.parent_index(v.child)))) s += v.mass;
        for (const auto& l : mu.lateral)
            if (oracle::contains(c, lat.cube(lat.common_ancestor(l.low, l.high)))) s += l.mass;
        for (const auto& g : mu.region)
            if (oracle::contains(c, lat.cube(g.cube))) s += g.mass;
        EXPECT_NEAR(boxes[q], s, 1e-12 * (1.0 + s));
    }
}

TEST(Probes, ConstantDataVanish) {
    const auto u = solve_poisson(GridFunction(1, 6, std::vector<double>(64, 4.0)));
    const DyadicCube q{1, 2, {1, 0}};
    const Graph graph = [](double) { return 0.25 / 16.0; };
    EXPECT_NEAR(ns_probe(*u, graph, q).lhs, 0.0, 1e-18);
    EXPECT_NEAR(ns_probe(*u, graph, q).rhs, 0.0, 1e-18);
    EXPECT_NEAR(sn_probe(*u, graph, q).lhs, 0.0, 1e-18);
    EXPECT_NEAR(sn_probe(*u, graph, q).rhs, 16.0, 1e-8);
}

TEST(Probes, IndicatorWithFlatGraphIsStableUnderRefinement) {
    GridFunction g(1, 8);
    for (std::size_t c = 96; c < 160; ++c) g[c] = 1.0;
    const auto u = solve_poisson(g);
    const DyadicCube q{1, 1, {0, 0}};
    const Graph graph = [&](double) { return q.side() / 16.0; };
    const ProbeSides a = ns_probe(*u, graph, q);
    ProbeOptions fine;
    fine.x_panels = 64;
    fine.t_panels = 32;
    const ProbeSides b = ns_probe(*u, graph, q, fine);
    EXPECT_GT(a.lhs, 0.0);
    EXPECT_GT(a.rhs, 0.0);
    EXPECT_NEAR(a.lhs, b.lhs, 0.02 * b.lhs);
    EXPECT_NEAR(a.rhs, b.rhs, 0.02 * b.rhs);
    const ProbeSides s = sn_probe(*u, graph, q);
    EXPECT_NEAR(s.lhs, a.rhs / q.volume(), 1e-12 * s.lhs);
    EXPECT_GT(s.rhs, 0.0);
    EXPECT_LE(s.rhs, 1.0 + 1e-9);
}

TEST(Probes, RequireTheHarmonicBackend) {
    const FdSolution fd(GridFunction(1, 4), EllipticCoefficients::identity(4));
    const Graph graph = [](double) { return 0.01; };
    EXPECT_THROW((void)ns_probe(fd, graph, DyadicCube::unit(1)), bvx::ConfigError);
}

}  // namespace
