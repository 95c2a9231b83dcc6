#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "bvx/functionals.hpp"
#include "bvx/martingale.hpp"
#include "bvx/stopped_square.hpp"
#include "bvx/stopping.hpp"
#include "oracles/dyadic_brute.hpp"
#include "support.hpp"

namespace {

using bvx::DyadicCube;
using bvx::GridFunction;
using bvx::Lattice;
using bvx::WhitneyFunction;

std::set<std::size_t> members_of(const bvx::StoppingFamily& f) {
    return {f.cube_indices().begin(), f.cube_indices().end()};
}

TEST(AverageExtension, ConstantsAndHaar) {
    const WhitneyFunction c = bvx::dyadic_average_extension(GridFunction(2, 3, std::vector<double>(64, 1.5)));
    for (double v : c.values()) EXPECT_DOUBLE_EQ(v, 1.5);
    const WhitneyFunction h = bvx::dyadic_average_extension(testing_support::haar(1));
    EXPECT_DOUBLE_EQ(h.at(DyadicCube::unit(1)), 0.0);
    EXPECT_DOUBLE_EQ(h.at(DyadicCube{1, 1, {0, 0}}), 1.0);
    EXPECT_DOUBLE_EQ(h.at(DyadicCube{1, 1, {1, 0}}), -1.0);
}

TEST(AverageExtension, ParentIsMeanOfChildren) {
    const GridFunction g = testing_support::random_grid(2, 4, 9, false);
    const WhitneyFunction u = bvx::dyadic_average_extension(g);
    const Lattice& lat = u.lattice();
    for (std::size_t q = 0; q < lat.size(); ++q) {
        if (lat.level_of(q) == lat.levels() - 1) continue;
        double s = 0.0;
        for (std::size_t c : lat.child_indices(q)) s += u[c];
        EXPECT_NEAR(u[q], s / 4.0, 1e-14);
    }
}

TEST(Localize, SplitsOffTheMean) {
    const GridFunction z = testing_support::random_grid(1, 6, 1);
    const bvx::Localized lz = bvx::localize(z);
    for (double v : lz.constant.values()) EXPECT_NEAR(v, 0.0, 1e-15);

    const bvx::Localized five = bvx::localize(GridFunction(1, 4, std::vector<double>(16, 5.0)));
    for (double v : five.mean_zero.values()) EXPECT_EQ(v, 0.0);
    for (double v : five.extension.values()) EXPECT_EQ(v, 5.0);
    for (double v : bvx::carleson_of_gradient(bvx::gradient_measure(five.extension), bvx::CarlesonMode::dyadic).values())
        EXPECT_EQ(v, 0.0);

    const GridFunction g = testing_support::random_grid(1, 6, 2, false);
    const bvx::Localized l = bvx::localize(g);
    for (std::size_t c = 0; c < g.size(); ++c) EXPECT_NEAR(l.mean_zero[c] + l.constant[c], g[c], 1e-14);
    EXPECT_NEAR(bvx::mean(l.mean_zero), 0.0, 1e-15);
}

TEST(Stopping, HaarChildrenAtDepthTwo) {
    const GridFunction g(1, 2, {1.0, 1.0, -1.0, -1.0});
    const WhitneyFunction u = bvx::dyadic_average_extension(g);
    const Lattice lat = g.lattice();
    auto kids = bvx::stopping_children(DyadicCube::unit(1), u, g, 0.5);
    std::sort(kids.begin(), kids.end());
    ASSERT_EQ(kids.size(), 2U);
    EXPECT_EQ(kids[0], lat.index(DyadicCube{1, 1, {0, 0}}));
    EXPECT_EQ(kids[1], lat.index(DyadicCube{1, 1, {1, 0}}));
    EXPECT_TRUE(bvx::stopping_children(DyadicCube::unit(1), u, g, 2.0).empty());
    const GridFunction zero(1, 3);
    EXPECT_TRUE(bvx::stopping_children(DyadicCube::unit(1), bvx::dyadic_average_extension(zero), zero, 0.1).empty());
}

TEST(Stopping, GenerationsMatchDefinition) {
    EXPECT_EQ(bvx::build_generations(GridFunction(1, 5), 0.25).size(), 1U);
    const GridFunction h(1, 2, {1.0, 1.0, -1.0, -1.0});
    EXPECT_EQ(members_of(bvx::build_generations(h, 0.5)), oracle::average_generations(h, 0.5));
    EXPECT_EQ(bvx::build_generations(h, 0.5).size(), 3U);
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const int n = 1 + static_cast<int>(seed % 2);
        const GridFunction g = testing_support::random_grid(n, n == 1 ? 6 : 3, seed);
        for (double eps : {0.1, 0.25, 0.5}) {
            const bvx::StoppingFamily fam = bvx::build_generations(g, eps);
            EXPECT_EQ(members_of(fam), oracle::average_generations(g, eps)) << "seed " << seed << " eps " << eps;
        }
    }
}

TEST(Stopping, MembersSatisfyTheRuleAgainstTheirParent) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const GridFunction g = testing_support::random_grid(1, 8, seed);
        const double eps = 0.3;
        const bvx::StoppingFamily fam = bvx::build_generations(g, eps);
        const WhitneyFunction u = bvx::dyadic_average_extension(g);
        const auto m = bvx::truncated_maximal(g, g.lattice());
        for (std::size_t i = 0; i < fam.size(); ++i) {
            const std::size_t p = fam.parent(i);
            if (p == i) continue;
            const std::size_t q = fam.cube_index(i);
            EXPECT_GE(std::abs(u[q] - u[fam.cube_index(p)]), eps * m[q]);
            EXPECT_EQ(fam.generation(i), fam.generation(p) + 1);
        }
    }
}

TEST(StoppingFamily, InsertionOrderDoesNotMatter) {
    const Lattice lat = Lattice::full(1, 6);
    const std::vector<std::size_t> cubes{0, 5, 20, 70, 3, 100};
    bvx::StoppingFamily a(lat), b(lat);
    for (std::size_t c : cubes) a.insert(c);
    for (auto it = cubes.rbegin(); it != cubes.rend(); ++it) b.insert(*it);
    for (std::size_t c : cubes) {
        const auto pa = a.cube_index(a.parent(static_cast<std::size_t>(a.slot(c))));
        const auto pb = b.cube_index(b.parent(static_cast<std::size_t>(b.slot(c))));
        EXPECT_EQ(pa, pb);
    }
    for (std::size_t q = 0; q < lat.size(); ++q) {
        const auto oa = a.owner(q), ob = b.owner(q);
        ASSERT_EQ(oa < 0, ob < 0);
        if (oa >= 0) { EXPECT_EQ(a.cube_index(static_cast<std::size_t>(oa)), b.cube_index(static_cast<std::size_t>(ob))); }
    }
}

TEST(StoppingFamily, PackingMatchesDoubleLoop) {
    bvx::StoppingFamily single(Lattice::full(1, 5));
    single.insert(0);
    EXPECT_EQ(bvx::carleson_packing(single), 1.0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const int n = 1 + static_cast<int>(seed % 2);
        const Lattice lat = Lattice::full(n, n == 1 ? 6 : 3);
        const auto fam = bvx::random_family(lat, 0.3, seed);
        const std::vector<std::size_t> m(fam.cube_indices().begin(), fam.cube_indices().end());
        EXPECT_EQ(bvx::carleson_packing(fam), oracle::packing(lat, m));
        EXPECT_EQ(bvx::carleson_packing_direct(fam), oracle::packing(lat, m));
    }
}

TEST(Approximant, ZeroAndHaar) {
    const bvx::Approximant zero = bvx::build_approximant(GridFunction(1, 5), 0.25);
    for (double v : zero.f.values()) EXPECT_EQ(v, 0.0);

    const GridFunction h(1, 2, {1.0, 1.0, -1.0, -1.0});
    const bvx::Approximant a = bvx::build_approximant(h, 0.5);
    const Lattice lat = h.lattice();
    EXPECT_EQ(a.f[0], 0.0);
    for (std::size_t q = 1; q < lat.size(); ++q)
        EXPECT_EQ(a.f[q], lat.cube(q).upper(0) <= 0.5 ? 1.0 : -1.0) << q;
    EXPECT_THROW((void)bvx::build_approximant(GridFunction(1, 2, {1.0, 1.0, 1.0, 1.0}), 0.5), std::invalid_argument);
}

TEST(Approximant, PointwiseClosenessAndSawtooth) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const GridFunction g = testing_support::random_grid(1, 8, seed);
        const double eps = seed % 2 ? 0.25 : 0.5;
        const bvx::Approximant a = bvx::build_approximant(g, eps);
        EXPECT_LE(a.report.closeness, eps);
        // f is the average over the owning member on every cube.
        for (std::size_t q = 0; q < a.f.size(); ++q) {
            const auto o = a.family.owner(q);
            ASSERT_GE(o, 0);
            EXPECT_EQ(a.f[q], a.u[a.family.cube_index(static_cast<std::size_t>(o))]);
        }
    }
}

TEST(Approximant, Homogeneous) {
    const GridFunction g = testing_support::random_grid(1, 7, 3);
    const bvx::Approximant a = bvx::build_approximant(g, 0.3);
    const bvx::Approximant b = bvx::build_approximant(-4.0 * g, 0.3);
    EXPECT_EQ(members_of(a.family), members_of(b.family));
    for (std::size_t q = 0; q < a.f.size(); ++q) EXPECT_NEAR(b.f[q], -4.0 * a.f[q], 1e-12);
}

TEST(BoxJump, RandomFunctionsHaveFiniteConstant) {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const WhitneyFunction f = testing_support::random_whitney(Lattice::full(1, 6), seed);
        for (std::size_t q = 0; q < f.size(); q += 7) {
            const auto s = bvx::box_jump_report(f, f.lattice().cube(q));
            if (s.vertical + s.boundary > 0.0) worst = std::max(worst, s.lateral / (s.vertical + s.boundary));
        }
    }
    EXPECT_TRUE(std::isfinite(worst));
    EXPECT_GT(worst, 0.0);
}

TEST(Lacunary, NormsAndDomain) {
    const GridFunction g0 = bvx::lacunary_function(0, 4);
    for (std::size_t c = 0; c < g0.size(); ++c) EXPECT_EQ(g0[c], c < 8 ? 1.0 : -1.0);
    EXPECT_EQ(std::pow(bvx::lp_norm(g0, 2.0), 2), 1.0);
    EXPECT_DOUBLE_EQ(std::pow(bvx::lp_norm(bvx::lacunary_function(3, 8), 2.0), 2), 4.0);
    EXPECT_THROW((void)bvx::lacunary_function(8, 8), std::invalid_argument);
    const auto r = bvx::lacunary_report(4, 8);
    EXPECT_DOUBLE_EQ(r.l2_norm * r.l2_norm, 5.0);
    EXPECT_GT(r.min_carleson, 0.0);
}

}  // namespace
