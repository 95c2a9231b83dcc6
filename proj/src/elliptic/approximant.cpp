#include "bvx/elliptic/approximant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bvx/errors.hpp"
#include "bvx/functionals.hpp"
#include "bvx/quadrature.hpp"

namespace bvx::elliptic {

namespace {

constexpr int kOrder = 4;

// Geometric t-panels [delta l 2^k, delta l 2^{k+1}] up to l; each is split
// into enough x-panels to keep them roughly square.
template <class F>
double whitney_integral(const Lattice& lat, const DyadicCube& q, int refine, F&& f) {
    const GaussRule& rule = gauss_rule(kOrder);
    const double side = q.side();
    double lo = lat.whitney_bottom(q);
    double total = 0.0;
    while (lo < side) {
        const double hi = std::min(2.0 * lo, side);
        const int panels = refine * std::max(2, static_cast<int>(std::ceil(side / (hi - lo))));
        const double width = side / panels;
        for (int p = 0; p < panels; ++p) {
            const double x0 = q.lower(0) + p * width;
            total += integrate(rule, lo, hi, [&](double t) {
                return integrate(rule, x0, x0 + width, [&](double x) { return f(t, x); });
            });
        }
        lo = hi;
    }
    return total;
}

template <class F>
double segment_integral(double a, double b, int panels, F&& f) {
    const GaussRule& rule = gauss_rule(kOrder);
    const double width = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) total += integrate(rule, a + p * width, a + (p + 1) * width, f);
    return total;
}

// Integral of |u - c| over the boundary of W_Q.
double whitney_boundary_jump(const SolutionField& u, const Lattice& lat, const DyadicCube& q, double c, int refine) {
    const double side = q.side();
    const double bottom = lat.whitney_bottom(q);
    const int x_panels = refine * static_cast<int>(std::ceil(side / bottom));
    auto across = [&](double t) {
        return segment_integral(q.lower(0), q.upper(0), x_panels, [&](double x) { return std::abs(u.value(t, x) - c); });
    };
    double total = across(bottom) + across(side);
    for (double x : {q.lower(0), q.upper(0)}) {
        double lo = bottom;
        while (lo < side) {
            const double hi = std::min(2.0 * lo, side);
            total += segment_integral(lo, hi, refine, [&](double t) { return std::abs(u.value(t, x) - c); });
            lo = hi;
        }
    }
    return total;
}

double cell_integral(const GridFunction& g, const DyadicCube& q) {
    const int depth = g.depth();
    const auto first = static_cast<std::size_t>(std::ldexp(q.lower(0), depth));
    const auto last = static_cast<std::size_t>(std::ldexp(q.upper(0), depth));
    double s = 0.0;
    for (std::size_t c = first; c < last; ++c) s += g[c];
    return s * g.cell_volume();
}

double cell_minimum(const GridFunction& g, const DyadicCube& q) {
    const int depth = g.depth();
    const auto first = static_cast<std::size_t>(std::ldexp(q.lower(0), depth));
    const auto last = static_cast<std::size_t>(std::ldexp(q.upper(0), depth));
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t c = first; c < last; ++c) m = std::min(m, g[c]);
    return m;
}

// Per cube, max over its lattice ancestors (itself included) of v.
GridFunction ancestor_max_per_cell(const Lattice& lat, std::span<const double> v) {
    GridFunction out(1, lat.depth());
    for (std::size_t c = 0; c < out.size(); ++c) {
        double m = 0.0;
        for (int l = 0; l < lat.levels(); ++l) m = std::max(m, v[lat.cell_ancestor(c, l)]);
        out[c] = m;
    }
    return out;
}

}  // namespace

void EllipticParams::validate() const {
    geometry.validate();
    if (!geometry.elliptic) throw ConfigError("geometry.elliptic: must be set for the elliptic construction");
    if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("eps: must lie in (0, 1)");
    if (!(threshold > 1.0)) throw ConfigError("threshold: must be > 1");
    if (resolution < 1 || resolution > 64) throw ConfigError("resolution: must lie in [1, 64]");
    if (!(eta >= 0.0 && eta < 1.0)) throw ConfigError("eta: must lie in [0, 1)");
}

double EllipticParams::resolved_eta(double holder) const {
    return eta > 0.0 ? eta : std::pow(eps / 10.0, 1.0 / holder);
}

EllipticRun run_elliptic(const SolutionField& u, int depth, const EllipticParams& params) {
    params.validate();
    if (u.dim() != 1) throw ConfigError("the elliptic construction supports n = 1 only");
    const int skip = params.geometry.skip;
    if (depth < skip) throw ConfigError("depth must be at least the skip");
    const Lattice lat = Lattice::skip(1, depth, skip);
    const double eta = params.resolved_eta(u.holder_exponent());
    const double eps_internal = params.eps / 2.0;

    WhitneySamples samples(lat, u, eta, params.resolution);
    GridFunction nu = cone_maximal(samples, params.geometry.aperture);
    std::vector<double> maximal = truncated_maximal(nu, lat);
    GridFunction maximal_cells = lattice_maximal(nu, lat);
    StoppingFamily principal = build_principal(lat, maximal, params.threshold);
    StoppingFamily stopping =
        build_stopping(samples, maximal, principal, params.eps, eps_internal, u.holder_exponent());
    StoppingFamily oscillation = build_oscillation(samples, maximal, eps_internal);

    WhitneyFunction coarse(lat);
    for (std::size_t q = 0; q < lat.size(); ++q) {
        const auto s = static_cast<std::size_t>(stopping.owner(q));
        coarse[q] = samples.corkscrew(stopping.cube_index(s)).u;
    }
    // f = u on the samples of every R, coarse elsewhere.
    std::vector<double> f(samples.all().size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const std::size_t q = samples.cube_of(i);
        f[i] = oscillation.contains(q) ? samples.all()[i].u : coarse[q];
    }
    return EllipticRun{params,
                       eta,
                       eps_internal,
                       std::move(samples),
                       std::move(nu),
                       std::move(maximal),
                       std::move(maximal_cells),
                       std::move(principal),
                       std::move(stopping),
                       std::move(oscillation),
                       std::move(coarse),
                       std::move(f)};
}

JumpMeasure coarse_gradient(const EllipticRun& run) { return gradient_measure(run.coarse); }

double whitney_gradient_mass(const SolutionField& u, const Lattice& lattice, const DyadicCube& q) {
    return whitney_integral(lattice, q, 1, [&](double t, double x) {
        const auto g = u.gradient(t, x);
        return std::hypot(g[0], g[1]);
    });
}

JumpMeasure correction_gradient(const EllipticRun& run, const SolutionField& u) {
    const Lattice& lat = run.lattice();
    JumpMeasure mu(lat);
    for (std::size_t r : run.oscillation.cube_indices()) {
        const DyadicCube q = lat.cube(r);
        const double mass = whitney_gradient_mass(u, lat, q) + whitney_boundary_jump(u, lat, q, run.coarse[r], 1);
        mu.region.push_back({r, mass});
    }
    return mu;
}

std::vector<double> open_box_masses(const JumpMeasure& mu) {
    const Lattice& lat = mu.lattice;
    std::vector<double> own(lat.size(), 0.0);
    for (const VerticalJump& v : mu.vertical) own[lat.parent_index(v.child)] += v.mass;
    for (const LateralJump& l : mu.lateral) own[lat.common_ancestor(l.low, l.high)] += l.mass;
    for (const RegionMass& r : mu.region) own[r.cube] += r.mass;
    for (int level = lat.levels() - 1; level > 0; --level)
        for (std::size_t i = lat.level_offset(level); i < lat.level_offset(level) + lat.level_size(level); ++i)
            own[lat.parent_index(i)] += own[i];
    return own;
}

ApproximationReport approximation_report(const EllipticRun& run, const SolutionField& u) {
    const Lattice& lat = run.lattice();
    const WhitneySamples& samples = run.samples;
    const GeometryConfig& geo = run.params.geometry;
    const double eps = run.params.eps;
    const double delta = geo.delta();
    ApproximationReport rep;
    rep.cells = lat.cell_count();
    rep.principal_size = run.principal.size();
    rep.stopping_size = run.stopping.size();
    rep.oscillation_size = run.oscillation.size();
    rep.packing_principal = carleson_packing(run.principal);
    rep.packing_stopping = carleson_packing(run.stopping);
    rep.packing_oscillation = run.oscillation.size() == 0 ? 0.0 : carleson_packing(run.oscillation);

    const SparseCertificate cert = sparse_certificate(run.principal, run.params.threshold);
    rep.sparse_violations = cert.violations;
    rep.sparse_worst = cert.worst;
    rep.principal_rule_violations =
        owner_rule_violations(run.principal, PrincipalRule{run.maximal, run.params.threshold});
    rep.stopping_rule_violations =
        owner_rule_violations(run.stopping, CorkscrewRule{&samples, run.maximal, run.eps_internal});
    rep.cone_bound = cone_bound_check(samples, run.maximal);
    rep.corkscrew_jump = corkscrew_jump_check(samples, run.maximal, run.stopping, run.principal, run.eps_internal);

    // Closeness at the samples of every W_Q.
    std::vector<double> err(lat.size(), 0.0);
    for (std::size_t i = 0; i < run.f.size(); ++i)
        if (samples.in_region(i)) {
            const std::size_t q = samples.cube_of(i);
            err[q] = std::max(err[q], std::abs(run.f[i] - samples.all()[i].u));
        }
    for (std::size_t q = 0; q < lat.size(); ++q) {
        const double bound = eps * run.maximal[q];
        if (err[q] > bound) ++rep.cube_violations;
        if (bound > 0.0) rep.cube_ratio = std::max(rep.cube_ratio, err[q] / bound);
    }
    const GridFunction n_err = ancestor_max_per_cell(lat, err);
    for (std::size_t c = 0; c < n_err.size(); ++c) {
        const double bound = eps * run.maximal_cells[c];
        if (n_err[c] > bound) ++rep.cell_violations;
        if (bound > 0.0) rep.cell_ratio = std::max(rep.cell_ratio, n_err[c] / bound);
    }

    // Carleson control of grad f = grad coarse + grad correction.
    const JumpMeasure g1 = coarse_gradient(run);
    const JumpMeasure g2 = correction_gradient(run, u);
    rep.coarse_mass = g1.interior_total();
    rep.correction_mass = g2.interior_total();
    const GridFunction c = carleson_of_gradient(merge(g1, g2), CarlesonMode::dyadic);
    for (std::size_t i = 0; i < c.size(); ++i)
        if (run.maximal_cells[i] > 0.0) rep.c_eps = std::max(rep.c_eps, c[i] / run.maximal_cells[i]);

    // |grad(1_box coarse)| over each open Carleson box: interior jumps, the top
    // face and the two side faces.
    const std::vector<double> inside = open_box_masses(g1);
    for (std::size_t q0 = 0; q0 < lat.size(); ++q0) {
        const DyadicCube box = lat.cube(q0);
        double mass = inside[q0] + std::abs(run.coarse[q0]) * box.volume();
        for (int l = lat.level_of(q0); l < lat.levels(); ++l) {
            const int g = lat.generation(l);
            const auto per_side = static_cast<std::uint32_t>(1U << (g - box.j));
            const double thickness = lat.whitney_fraction() * std::ldexp(1.0, -g);
            for (std::uint32_t k : {box.k[0] * per_side, box.k[0] * per_side + per_side - 1}) {
                const DyadicCube q{1, g, {k, 0}};
                mass += std::abs(run.coarse[lat.index(q)]) * thickness;
                if (per_side == 1) break;
            }
        }
        const double denom = cell_integral(run.nu, box);
        if (denom > 0.0) rep.coarse_box_constant = std::max(rep.coarse_box_constant, mass / denom);
    }

    for (std::size_t r : run.oscillation.cube_indices()) {
        const DyadicCube q = lat.cube(r);
        const double denom = cell_minimum(run.nu, q) * q.volume();
        if (denom > 0.0)
            rep.whitney_gradient_constant = std::max(rep.whitney_gradient_constant, whitney_gradient_mass(u, lat, q) / denom);
    }

    // Boundary length of each sawtooth: faces between regions of different
    // owners, the top of the root, the domain sides and the finest bottoms.
    std::vector<double> surface(run.stopping.size(), 0.0);
    const int finest = lat.finest_generation();
    for (std::size_t q = 0; q < lat.size(); ++q) {
        const DyadicCube cube = lat.cube(q);
        const auto o = static_cast<std::size_t>(run.stopping.owner(q));
        const double thickness = lat.whitney_fraction() * cube.side();
        if (lat.level_of(q) == 0) {
            surface[o] += cube.volume();
        } else {
            const auto po = static_cast<std::size_t>(run.stopping.owner(lat.parent_index(q)));
            if (po != o) {
                surface[o] += cube.volume();
                surface[po] += cube.volume();
            }
        }
        if (cube.j == finest) surface[o] += cube.volume();
        const std::uint32_t last = (1U << cube.j) - 1;
        if (cube.k[0] == 0) surface[o] += thickness;
        if (cube.k[0] == last) {
            surface[o] += thickness;
        } else {
            DyadicCube nb = cube;
            nb.k[0] += 1;
            const auto no = static_cast<std::size_t>(run.stopping.owner(lat.index(nb)));
            if (no != o) {
                surface[o] += thickness;
                surface[no] += thickness;
            }
        }
    }
    for (std::size_t s = 0; s < surface.size(); ++s)
        rep.surface_constant = std::max(rep.surface_constant, surface[s] / run.stopping.cube(s).volume());

    rep.overlap = max_overlap(samples, geo.delta_prime, geo.kappa_prime);

    for (std::size_t s = 0; s < run.stopping.size(); ++s) {
        const EnvelopeFeatures e =
            envelope_features(run.stopping, s, run.principal, samples, delta, geo.delta_prime, geo.kappa_prime);
        rep.envelopes.hidden_violations += e.hidden_violations;
        rep.envelopes.uncovered_violations += e.uncovered_violations;
        rep.envelopes.covered_overwritten += e.covered_overwritten;
        rep.envelopes.order_violations += e.order_violations;
        rep.envelopes.region_violations += e.region_violations;
        rep.envelopes.cells_checked += e.cells_checked;
        rep.envelopes.samples_checked += e.samples_checked;
        rep.tent_lipschitz =
            std::max(rep.tent_lipschitz, tent_envelope(run.stopping, s, delta).measured_lipschitz(lat.depth()));
    }
    for (std::size_t p = 0; p < run.principal.size(); ++p)
        rep.floor_lipschitz =
            std::max(rep.floor_lipschitz, sawtooth_floor(run.principal, p, delta).measured_lipschitz(lat.depth()));
    return rep;
}

}  // namespace bvx::elliptic
