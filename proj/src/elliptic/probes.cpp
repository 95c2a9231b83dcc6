#include "bvx/elliptic/probes.hpp"

#include <algorithm>
#include <cmath>

#include "bvx/errors.hpp"
#include "bvx/quadrature.hpp"

namespace bvx::elliptic {

namespace {

constexpr int kOrder = 4;
// Graph heights are clamped away from the boundary, where u is only a trace.
constexpr double kFloor = 1e-12;

void require_harmonic(const SolutionField& u, const DyadicCube& q, const ProbeOptions& o) {
    if (u.backend() != "poisson") throw ConfigError("probes require the harmonic backend");
    if (u.dim() != 1 || q.n != 1) throw ConfigError("probes support n = 1 only");
    if (!(o.theta > 0.0 && o.theta <= 1.0)) throw ConfigError("theta must lie in (0, 1]");
    if (!(o.eta > 0.0 && o.eta < 1.0)) throw ConfigError("eta must lie in (0, 1)");
    if (o.x_panels < 1 || o.t_panels < 1) throw ConfigError("panel counts must be >= 1");
}

template <class F>
double over_x(double a, double b, int panels, F&& f) {
    const GaussRule& rule = gauss_rule(kOrder);
    const double w = (b - a) / panels;
    double s = 0.0;
    for (int p = 0; p < panels; ++p) s += integrate(rule, a + p * w, a + (p + 1) * w, f);
    return s;
}

// Panels [a + L 2^{-k-1}, a + L 2^{-k}] for k < panels, plus [a, a + L 2^{-panels}].
template <class F>
double over_t(double a, double b, int panels, F&& f) {
    const GaussRule& rule = gauss_rule(kOrder);
    const double len = b - a;
    double s = integrate(rule, a, a + std::ldexp(len, -panels), f);
    for (int k = 0; k < panels; ++k) s += integrate(rule, a + std::ldexp(len, -k - 1), a + std::ldexp(len, -k), f);
    return s;
}

double weighted_energy(const SolutionField& u, const Graph& graph, const DyadicCube& q, const ProbeOptions& o) {
    const double top = q.side();
    return over_x(q.lower(0), q.upper(0), o.x_panels, [&](double x) {
        const double floor_t = std::max(graph(x), kFloor * q.side());
        if (!(floor_t < top)) return 0.0;
        return over_t(floor_t, top, o.t_panels, [&](double t) {
            const auto g = u.gradient(t, x);
            return (g[0] * g[0] + g[1] * g[1]) * (t - floor_t);
        });
    });
}

}  // namespace

ProbeSides ns_probe(const SolutionField& u, const Graph& graph, const DyadicCube& q, const ProbeOptions& o) {
    require_harmonic(u, q, o);
    const double anchor = u.value((1.0 - o.eta) * q.side(), q.center(0));
    const double half = 0.5 * o.theta * q.side();
    ProbeSides out;
    out.lhs = over_x(q.center(0) - half, q.center(0) + half, o.x_panels, [&](double x) {
        const double d = u.value(std::max(graph(x), kFloor * q.side()), x) - anchor;
        return d * d;
    });
    out.rhs = weighted_energy(u, graph, q, o);
    return out;
}

ProbeSides sn_probe(const SolutionField& u, const Graph& graph, const DyadicCube& q, const ProbeOptions& o) {
    require_harmonic(u, q, o);
    ProbeSides out;
    out.lhs = weighted_energy(u, graph, q, o) / q.volume();
    const int nx = 4 * o.x_panels;
    const double top = q.side();
    for (int i = 0; i < nx; ++i) {
        const double x = q.lower(0) + (i + 0.5) * top / nx;
        const double floor_t = std::max(graph(x), kFloor * q.side());
        if (!(floor_t < top)) continue;
        for (int k = 0; k <= 2 * o.t_panels; ++k) {
            const double t = floor_t + std::ldexp(top - floor_t, -k) * (k == 0 ? 0.999 : 1.0);
            const double v = u.value(t, x);
            out.rhs = std::max(out.rhs, v * v);
        }
    }
    return out;
}

}  // namespace bvx::elliptic
