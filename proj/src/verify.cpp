#include "bvx/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "bvx/functionals.hpp"
#include "bvx/kernels.hpp"
#include "bvx/martingale.hpp"
#include "bvx/stopped_square.hpp"
#include "bvx/stopping.hpp"
#include "bvx/trace_extension.hpp"

namespace bvx {

namespace {

constexpr double kRelative = 1e-10;

CheckResult at_most(std::string name, double measured, double bound) {
    return {std::move(name), measured <= bound, measured, bound};
}

// Every lattice cube as a member: the stopped square function over all of D.
StoppingFamily whole_lattice(const Lattice& lat) {
    StoppingFamily f(lat);
    for (std::size_t q = 0; q < lat.size(); ++q) f.insert(q);
    return f;
}

// Haar square function, n = 1: sum over dyadic P containing x with children
// of (avg_left - avg_right)^2 / 4, computed from cell sums directly.
GridFunction haar_square_function(const GridFunction& g) {
    GridFunction out(1, g.depth());
    const std::size_t cells = g.size();
    for (int gen = 0; gen < g.depth(); ++gen) {
        const std::size_t width = cells >> gen;
        for (std::size_t start = 0; start < cells; start += width) {
            double left = 0.0;
            double right = 0.0;
            for (std::size_t c = 0; c < width / 2; ++c) left += g[start + c];
            for (std::size_t c = width / 2; c < width; ++c) right += g[start + c];
            const double half = static_cast<double>(width / 2);
            const double d = (left - right) / half;
            for (std::size_t c = start; c < start + width; ++c) out[c] += 0.25 * d * d;
        }
    }
    for (std::size_t c = 0; c < cells; ++c) out[c] = std::sqrt(out[c]);
    return out;
}

}  // namespace

std::vector<CheckResult> verify_suite(const GridFunction& g, double eps, double p, std::uint64_t seed) {
    std::vector<CheckResult> out;
    const Lattice lat = g.lattice();
    const double scale = std::max(1.0, kernels::max_abs(g.values()));

    const Localized loc = localize(g);
    const Approximant a = build_approximant(loc.mean_zero, eps, p);
    out.push_back(at_most("approximant_closeness", a.report.closeness, eps));

    double truncated_maximal_ratio = 0.0;
    for (std::size_t q = 0; q < lat.size(); ++q) {
        const DyadicCube cube = lat.cube(q);
        if (!(maximal_truncated(g, cube) > 0.0)) continue;
        const TruncatedMaximalSides s = truncated_maximal_check(g, cube);
        truncated_maximal_ratio = std::max(truncated_maximal_ratio, s.lhs / s.rhs);
    }
    out.push_back(at_most("truncated_maximal_constant_4", truncated_maximal_ratio, 1.0));

    const StoppingFamily fam = random_family(lat, 0.2, seed);
    const L2Sides l2 = l2_bound_check(g, fam);
    out.push_back(at_most("stopped_square_l2", l2.lhs, l2.rhs * (1.0 + kRelative)));
    out.push_back(at_most("martingale_orthogonality", martingale_orthogonality_error(martingale_sequence(g, fam)), 1e-12));

    const double tree = carleson_packing(fam);
    const double direct = carleson_packing_direct(fam);
    out.push_back(at_most("carleson_tree_vs_direct", std::abs(tree - direct), kRelative * std::max(1.0, direct)));

    const WhitneyFunction u = dyadic_average_extension(loc.mean_zero);
    const std::vector<double> m = truncated_maximal(loc.mean_zero, lat);
    const std::array<std::size_t, 1> top{0};
    const AverageStopRule rule{&u, &m, eps};
    const bool same = same_members(build_family(lat, top, rule), build_family_reference(lat, top, rule));
    out.push_back({"stopping_fast_vs_reference", same, same ? 0.0 : 1.0, 0.0});

    const TraceResult tr = trace_whitney(dyadic_average_extension(g));
    double err = 0.0;
    for (std::size_t c = 0; c < g.size(); ++c) err = std::max(err, std::abs(tr.trace[c] - g[c]));
    out.push_back(at_most("trace_round_trip", err, 1e-12 * scale));

    if (g.dim() == 1) {
        const GridFunction s = stopped_square(g, whole_lattice(lat));
        const GridFunction h = haar_square_function(g);
        double diff = 0.0;
        for (std::size_t c = 0; c < g.size(); ++c) diff = std::max(diff, std::abs(s[c] - h[c]));
        out.push_back(at_most("square_function_vs_haar", diff, kRelative * scale));
    }

    if (kernels::max_abs(g.values()) == 0.0) {
        const WhitneyFunction f = dyadic_average_extension(g);
        const double total = kernels::max_abs(nontangential_max(f, 1.0).values()) +
                             kernels::max_abs(carleson_dyadic(f).values()) +
                             kernels::max_abs(area_dyadic(f).values());
        out.push_back(at_most("zero_data_functionals", total, 0.0));
    }
    return out;
}

}  // namespace bvx
