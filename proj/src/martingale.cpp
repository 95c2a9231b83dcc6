#include "bvx/martingale.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bvx/errors.hpp"
#include "bvx/functionals.hpp"

namespace bvx {

WhitneyFunction dyadic_average_extension(const GridFunction& g) {
    const Lattice lat = g.lattice();
    return WhitneyFunction(lat, cube_averages(g, lat, false));
}

Localized localize(const GridFunction& g) {
    const double m = mean(g);
    std::vector<double> c(g.size(), m);
    GridFunction constant(g.dim(), g.depth(), std::move(c));
    GridFunction rest = g - constant;
    return {std::move(rest), std::move(constant), WhitneyFunction(g.lattice(), m), m};
}

bool AverageStopRule::operator()(std::size_t candidate, std::size_t member) const {
    const double m = (*maximal)[candidate];
    return m > 0.0 && std::abs((*averages)[candidate] - (*averages)[member]) >= eps * m;
}

namespace {

void require_mean_zero(const GridFunction& g) {
    double scale = 0.0;
    for (double v : g.values()) scale = std::max(scale, std::abs(v));
    if (std::abs(mean(g)) > 1e-12 * scale) throw std::invalid_argument("boundary data must have mean zero; localize first");
}

void require_eps(double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw ConfigError("eps must be > 0");
}

}  // namespace

std::vector<std::size_t> stopping_children(const DyadicCube& q, const WhitneyFunction& u, const GridFunction& g,
                                           double eps) {
    require_eps(eps);
    const Lattice& lat = u.lattice();
    const std::vector<double> m = truncated_maximal(g, lat);
    const AverageStopRule rule{&u, &m, eps};
    const std::size_t root = lat.index(q);
    std::vector<std::size_t> out;
    std::vector<std::size_t> stack = lat.child_indices(root);
    while (!stack.empty()) {
        const std::size_t r = stack.back();
        stack.pop_back();
        if (rule(r, root)) {
            out.push_back(r);
            continue;
        }
        for (std::size_t c : lat.child_indices(r)) stack.push_back(c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

StoppingFamily build_generations(const GridFunction& g, double eps) {
    require_eps(eps);
    require_mean_zero(g);
    const Lattice lat = g.lattice();
    const WhitneyFunction u = dyadic_average_extension(g);
    const std::vector<double> m = truncated_maximal(g, lat);
    const std::size_t top = 0;
    return build_family(lat, std::span<const std::size_t>(&top, 1), AverageStopRule{&u, &m, eps});
}

ApproximationReport approximation_report(const GridFunction& g, const WhitneyFunction& f, const WhitneyFunction& u,
                                         double eps, double p) {
    ApproximationReport r;
    r.eps = eps;
    r.p = p;
    const GridFunction mg = maximal_dyadic(g);
    const GridFunction mmg = maximal_dyadic(mg);
    const GridFunction close = nontangential_max_dyadic(f - u);
    const JumpMeasure dt = gradient_measure(f, GradientPart::vertical);
    const JumpMeasure full = gradient_measure(f, GradientPart::full);
    const GridFunction cv = carleson_of_gradient(dt, CarlesonMode::dyadic);
    const GridFunction cf = carleson_of_gradient(full, CarlesonMode::dyadic);
    r.outer_top = full.outer_top;
    for (std::size_t c = 0; c < g.size(); ++c) {
        if (mg[c] > 0.0) r.closeness = std::max(r.closeness, close[c] / mg[c]);
        if (mmg[c] > 0.0) {
            r.carleson_vertical = std::max(r.carleson_vertical, eps * cv[c] / mmg[c]);
            r.carleson_full = std::max(r.carleson_full, eps * cf[c] / mmg[c]);
        }
    }
    const double nm = lp_norm(mg, p);
    const double nmm = lp_norm(mmg, p);
    if (nm > 0.0) r.closeness_norm = lp_norm(close, p) / nm;
    if (nmm > 0.0) {
        r.carleson_vertical_norm = eps * lp_norm(cv, p) / nmm;
        r.carleson_full_norm = eps * lp_norm(cf, p) / nmm;
    }
    return r;
}

Approximant build_approximant(const GridFunction& g, double eps, double p) {
    StoppingFamily family = build_generations(g, eps);
    WhitneyFunction u = dyadic_average_extension(g);
    const Lattice& lat = u.lattice();
    WhitneyFunction f(lat);
    // Every cube is owned: the top cube is a member.
    for (std::size_t i = 0; i < lat.size(); ++i) f[i] = u[family.cube_index(static_cast<std::size_t>(family.owner(i)))];
    ApproximationReport report = approximation_report(g, f, u, eps, p);
    report.members = family.size();
    report.generations = family.max_generation();
    return {std::move(f), std::move(u), std::move(family), report};
}

BoxJumpSides box_jump_report(const WhitneyFunction& f, const DyadicCube& q) {
    const Lattice& lat = f.lattice();
    if (!lat.admissible(q)) throw std::out_of_range("cube is not admissible on the function's lattice");
    const ClosedBox box = carleson_box(q);
    BoxJumpSides s{};
    s.lateral = closed_box_mass(gradient_measure(f, GradientPart::lateral), box);
    s.vertical = closed_box_mass(gradient_measure(f, GradientPart::vertical), box);
    for (const DyadicCube& nb : same_scale_neighbors(q)) s.boundary += std::abs(f.at(nb));
    s.boundary *= q.volume();
    return s;
}

GridFunction lacunary_function(int k, int depth) {
    if (k < 0 || k >= depth) throw std::invalid_argument("lacunary generations require 0 <= k < depth");
    GridFunction g(1, depth);
    for (int gen = 0; gen <= k; ++gen) {
        const std::size_t width = std::size_t{1} << (depth - gen);
        for (std::size_t c = 0; c < g.size(); ++c) g[c] += ((c % width) < width / 2) ? 1.0 : -1.0;
    }
    return g;
}

LacunaryReport lacunary_report(int k, int depth) {
    const GridFunction g = lacunary_function(k, depth);
    const WhitneyFunction u = dyadic_average_extension(g);
    const GridFunction c = carleson_of_gradient(gradient_measure(u, GradientPart::full), CarlesonMode::dyadic);
    LacunaryReport r;
    r.k = k;
    r.l2_norm = lp_norm(g, 2.0);
    r.min_carleson = *std::min_element(c.values().begin(), c.values().end());
    return r;
}

}  // namespace bvx
