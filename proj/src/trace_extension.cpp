#include "bvx/trace_extension.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bvx/errors.hpp"
#include "bvx/martingale.hpp"
#include "bvx/quadrature.hpp"

namespace bvx {

TraceResult trace_whitney(const WhitneyFunction& f) {
    const Lattice& lat = f.lattice();
    GridFunction trace(lat.dim(), lat.depth());
    std::vector<GridFunction> increments;
    const int finest = lat.levels() - 1;
    for (int l = 0; l < finest; ++l) increments.emplace_back(lat.dim(), lat.depth());
    for (std::size_t c = 0; c < lat.cell_count(); ++c) {
        trace[c] = f[lat.cell_ancestor(c, finest)];
        for (int l = 0; l < finest; ++l)
            increments[static_cast<std::size_t>(l)][c] = std::abs(f[lat.cell_ancestor(c, l + 1)] - f[lat.cell_ancestor(c, l)]);
    }
    return {std::move(trace), std::move(increments)};
}

double contraction_inner_eps(double eps, double p) {
    if (!(p > 1.0)) throw ConfigError("p must be > 1");
    const double conjugate = p / (p - 1.0);
    return eps / (2.0 * conjugate);
}

ExtensionResult iterate_extension(const GridFunction& g, double eps, int iterations, double p) {
    if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("eps must lie in (0, 1)");
    if (iterations < 0) throw ConfigError("iteration count must be >= 0");
    ExtensionResult out{{}, WhitneyFunction(g.lattice()), {}, eps, contraction_inner_eps(eps, p), p, 0};
    GridFunction residual = g;
    double norm = lp_norm(residual, p);
    out.residual_norms.push_back(norm);
    const double floor = 1e-12 * norm;
    for (int k = 0; k < iterations && norm > 0.0; ++k) {
        const Localized loc = localize(residual);
        const Approximant a = build_approximant(loc.mean_zero, out.inner_eps, p);
        WhitneyFunction layer = a.f + loc.extension;
        GridFunction next = residual - trace_whitney(layer).trace;
        const double next_norm = lp_norm(next, p);
        if (next_norm > eps * norm + floor)
            throw ContractViolation("extension step " + std::to_string(k) + " did not contract: " +
                                    std::to_string(next_norm) + " > eps * " + std::to_string(norm));
        out.total = out.total + layer;
        out.layers.push_back({std::move(residual), std::move(layer)});
        residual = std::move(next);
        norm = next_norm;
        out.residual_norms.push_back(norm);
        ++out.iterations;
    }
    return out;
}

namespace {

// Antiderivative of (1 - w^2)^2 from -1 to v, v in [-1, 1]; total 16/15.
double bump_primitive(double v) {
    v = std::clamp(v, -1.0, 1.0);
    const double v2 = v * v;
    return v - 2.0 * v * v2 / 3.0 + v * v2 * v2 / 5.0 + 8.0 / 15.0;
}

double bump_profile(double v) {
    if (!(v > -1.0 && v < 1.0)) return 0.0;
    const double a = 1.0 - v * v;
    return a * a;
}

double s_cdf(double s) { return (15.0 / 16.0) * bump_primitive(2.0 * s - 3.0); }
double y_cdf(double y, double c1) { return (15.0 / 16.0) * bump_primitive(2.0 * y / c1); }

}  // namespace

double bump_s_density(double s) { return (15.0 / 8.0) * bump_profile(2.0 * s - 3.0); }
double bump_y_density(double y, double c1) { return (15.0 / (8.0 * c1)) * bump_profile(2.0 * y / c1); }

MollifiedField::MollifiedField(WhitneyFunction f, double c1)
    : f_(std::move(f)), jumps_(gradient_measure(f_)), c1_(c1) {
    if (!(c1 > 0.0)) throw ConfigError("c1 must be > 0");
}

template <bool Gradient>
void MollifiedField::accumulate(double t, std::span<const double> x, double& value, std::array<double, 3>& grad) const {
    value = 0.0;
    grad = {0.0, 0.0, 0.0};
    if (!(t > 0.0)) throw std::domain_error("mollified field is evaluated at t > 0 only");
    const Lattice& lat = f_.lattice();
    const int n = lat.dim();
    const int finest = lat.levels() - 1;
    const double reach = 0.5 * c1_ * t;
    for (int l = 0; l < lat.levels(); ++l) {
        const int g = lat.generation(l);
        const double side = std::ldexp(1.0, -g);
        const double bottom = l == finest ? 0.0 : lat.whitney_bottom(DyadicCube{n, g, {0, 0}});
        // s in (1, 2), so ts in (t, 2t) must meet [bottom, side).
        if (!(side > t && bottom < 2.0 * t)) continue;
        const double ts = s_cdf(side / t) - s_cdf(bottom / t);
        double dts = 0.0;
        if constexpr (Gradient) {
            dts = -bump_s_density(side / t) * side / (t * t);
            if (bottom > 0.0) dts += bump_s_density(bottom / t) * bottom / (t * t);
        }
        const std::int64_t last = (std::int64_t{1} << g) - 1;
        std::array<std::int64_t, kMaxDim> lo{0, 0};
        std::array<std::int64_t, kMaxDim> hi{0, 0};
        for (int a = 0; a < n; ++a) {
            const double xa = x[static_cast<std::size_t>(a)];
            lo[a] = std::clamp(static_cast<std::int64_t>(std::floor((xa - reach) / side)), std::int64_t{0}, last);
            hi[a] = std::clamp(static_cast<std::int64_t>(std::floor((xa + reach) / side)), std::int64_t{0}, last);
        }
        for (std::int64_t k0 = lo[0]; k0 <= hi[0]; ++k0)
            for (std::int64_t k1 = lo[1]; k1 <= hi[1]; ++k1) {
                const std::array<std::int64_t, kMaxDim> k{k0, k1};
                std::array<double, kMaxDim> ym{1.0, 1.0};
                std::array<double, kMaxDim> dyx{0.0, 0.0};
                std::array<double, kMaxDim> dyt{0.0, 0.0};
                for (int a = 0; a < n; ++a) {
                    const double xa = x[static_cast<std::size_t>(a)];
                    const double r0 = (static_cast<double>(k[a]) * side - xa) / t;
                    const double r1 = (static_cast<double>(k[a] + 1) * side - xa) / t;
                    ym[a] = y_cdf(r1, c1_) - y_cdf(r0, c1_);
                    if constexpr (Gradient) {
                        const double p0 = bump_y_density(r0, c1_);
                        const double p1 = bump_y_density(r1, c1_);
                        dyx[a] = (p0 - p1) / t;
                        dyt[a] = (p0 * r0 - p1 * r1) / t;
                    }
                }
                const std::size_t local = n == 1 ? static_cast<std::size_t>(k0)
                                                 : ((static_cast<std::size_t>(k0) << g) | static_cast<std::size_t>(k1));
                const double fq = f_[lat.level_offset(l) + local];
                if (fq == 0.0) continue;
                const double y = ym[0] * (n == 2 ? ym[1] : 1.0);
                value += fq * ts * y;
                if constexpr (Gradient) {
                    double dt = dts * y;
                    for (int a = 0; a < n; ++a) dt += ts * dyt[a] * (n == 2 ? ym[1 - a] : 1.0);
                    grad[0] += fq * dt;
                    for (int a = 0; a < n; ++a)
                        grad[static_cast<std::size_t>(a) + 1] += fq * ts * dyx[a] * (n == 2 ? ym[1 - a] : 1.0);
                }
            }
    }
}

double MollifiedField::value(double t, std::span<const double> x) const {
    double v = 0.0;
    std::array<double, 3> g{};
    accumulate<false>(t, x, v, g);
    return v;
}

std::array<double, 3> MollifiedField::gradient(double t, std::span<const double> x) const {
    double v = 0.0;
    std::array<double, 3> g{};
    accumulate<true>(t, x, v, g);
    return g;
}

GridFunction MollifiedField::trace() const {
    const Lattice& lat = f_.lattice();
    GridFunction out(lat.dim(), lat.depth());
    const double t = std::ldexp(0.25, -lat.depth());
    std::array<double, kMaxDim> x{0.0, 0.0};
    for (std::size_t c = 0; c < out.size(); ++c) {
        for (int a = 0; a < lat.dim(); ++a) x[static_cast<std::size_t>(a)] = out.cell_center(c, a);
        out[c] = value(t, std::span<const double>(x.data(), static_cast<std::size_t>(lat.dim())));
    }
    return out;
}

double MollifiedField::gradient_mass(const DyadicCube& q) const {
    const Lattice& lat = f_.lattice();
    const int n = lat.dim();
    const GaussRule& rule = gauss_rule(4);
    double total = 0.0;
    std::array<double, kMaxDim> x{0.0, 0.0};
    for (int g = q.j; g < lat.depth(); ++g) {
        const double side = std::ldexp(1.0, -g);
        const std::size_t per_axis = std::size_t{1} << (g - q.j);
        const std::size_t count = n == 1 ? per_axis : per_axis * per_axis;
        for (std::size_t r = 0; r < count; ++r) {
            std::array<double, kMaxDim> lo{0.0, 0.0};
            lo[0] = q.lower(0) + static_cast<double>(n == 1 ? r : r / per_axis) * side;
            if (n == 2) lo[1] = q.lower(1) + static_cast<double>(r % per_axis) * side;
            total += integrate(rule, 0.5 * side, side, [&](double t) {
                return integrate(rule, lo[0], lo[0] + side, [&](double x0) {
                    x[0] = x0;
                    if (n == 1) {
                        const auto gr = gradient(t, std::span<const double>(x.data(), 1));
                        return std::hypot(gr[0], gr[1]);
                    }
                    return integrate(rule, lo[1], lo[1] + side, [&](double x1) {
                        x[1] = x1;
                        const auto gr = gradient(t, std::span<const double>(x.data(), 2));
                        return std::sqrt(gr[0] * gr[0] + gr[1] * gr[1] + gr[2] * gr[2]);
                    });
                });
            });
        }
    }
    return total;
}

double MollifiedField::enlarged_jump_mass(const DyadicCube& q) const {
    ClosedBox box;
    box.t_top = 2.0 * q.side();
    bool reaches_side = false;
    double width = 1.0;
    for (int a = 0; a < q.n; ++a) {
        const double pad = 0.5 * c1_ * q.side();
        box.lo[a] = std::max(0.0, q.lower(a) - pad);
        box.hi[a] = std::min(1.0, q.upper(a) + pad);
        reaches_side = reaches_side || q.lower(a) - pad <= 0.0 || q.upper(a) + pad >= 1.0;
        width *= box.hi[a] - box.lo[a];
    }
    double mass = closed_box_mass(jumps_, box);
    if (box.t_top >= 1.0) mass += jumps_.outer_top * width;
    if (reaches_side) mass += jumps_.outer_lateral;
    return mass;
}

}  // namespace bvx
