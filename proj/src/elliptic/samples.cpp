#include "bvx/elliptic/samples.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "bvx/errors.hpp"

namespace bvx::elliptic {

WhitneySamples::WhitneySamples(const Lattice& lattice, const SolutionField& u, double eta, int resolution)
    : lattice_(lattice), resolution_(resolution), eta_(eta) {
    if (lattice.dim() != 1 || u.dim() != 1) throw ConfigError("the elliptic pipeline supports n = 1 only");
    if (resolution < 1) throw ConfigError("sample resolution must be >= 1");
    if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("eta must lie in (0, 1)");
    const double r = resolution;
    samples_.reserve(lattice.size() * stride());
    auto push = [&](double t, double x) { samples_.push_back({t, x, u.value(t, x)}); };
    for (std::size_t i = 0; i < lattice.size(); ++i) {
        const DyadicCube q = lattice.cube(i);
        const double side = q.side();
        const double bottom = lattice.whitney_bottom(q);
        for (int a = 0; a < resolution; ++a)
            for (int b = 0; b < resolution; ++b)
                push(bottom + (a + 0.5) * (side - bottom) / r, q.lower(0) + (b + 0.5) * side / r);
        push((1.0 - eta) * side, q.center(0));
        for (double f : {-0.5, -0.25, 0.0, 0.25, 0.5}) push(side, q.center(0) + f * eta * side);
    }
}

std::span<const Sample> WhitneySamples::region(std::size_t cube) const {
    return std::span<const Sample>(samples_).subspan(base(cube), per_region() + 1);
}

std::span<const Sample> WhitneySamples::top(std::size_t cube) const {
    return std::span<const Sample>(samples_).subspan(base(cube) + per_region() + 1, kTopPoints);
}

double WhitneySamples::oscillation(std::size_t cube) const {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const Sample& s : region(cube)) {
        lo = std::min(lo, s.u);
        hi = std::max(hi, s.u);
    }
    return hi - lo;
}

GridFunction cone_maximal(const WhitneySamples& samples, double aperture) {
    if (!(aperture > 0.0)) throw ConfigError("aperture must be > 0");
    const Lattice& lat = samples.lattice();
    GridFunction out(1, lat.depth());
    const std::size_t n = out.size();
    const double h = std::ldexp(1.0, -lat.depth());
    // Range-max tags on an implicit segment tree over the cells; a leaf's
    // value is the max of the tags on its root path.
    std::vector<double> tag(2 * n, 0.0);
    for (const Sample& s : samples.all()) {
        const double r = aperture * s.t;
        // Cells with |center - y| < r, centers at (c + 1/2) h.
        auto lo = static_cast<std::int64_t>(std::floor((s.x - r) / h - 0.5)) + 1;
        auto hi = static_cast<std::int64_t>(std::ceil((s.x + r) / h - 0.5)) - 1;
        lo = std::max<std::int64_t>(lo, 0);
        hi = std::min<std::int64_t>(hi, static_cast<std::int64_t>(n) - 1);
        if (lo > hi) continue;
        const double v = std::abs(s.u);
        for (std::size_t l = static_cast<std::size_t>(lo) + n, rr = static_cast<std::size_t>(hi) + 1 + n; l < rr;
             l >>= 1, rr >>= 1) {
            if (l & 1) {
                tag[l] = std::max(tag[l], v);
                ++l;
            }
            if (rr & 1) {
                --rr;
                tag[rr] = std::max(tag[rr], v);
            }
        }
    }
    for (std::size_t c = 0; c < n; ++c) {
        double v = 0.0;
        for (std::size_t k = c + n; k >= 1; k >>= 1) v = std::max(v, tag[k]);
        out[c] = v;
    }
    return out;
}

ConeBoundResult cone_bound_check(const WhitneySamples& samples, std::span<const double> maximal) {
    const Lattice& lat = samples.lattice();
    if (maximal.size() != lat.size()) throw std::invalid_argument("maximal values must be given per lattice cube");
    ConeBoundResult out;
    for (std::size_t i = 0; i < lat.size(); ++i) {
        const DyadicCube q = lat.cube(i);
        const int level = lat.level_of(i);
        const double floor_t = lat.whitney_bottom(q);
        double sup = 0.0;
        for (int l = 0; l <= level; ++l) {
            const int g = lat.generation(l);
            const auto count = static_cast<std::int64_t>(lat.level_size(l));
            const std::int64_t home = q.k[0] >> (q.j - g);
            for (std::int64_t k = std::max<std::int64_t>(home - 1, 0); k <= std::min(home + 1, count - 1); ++k) {
                const std::size_t r = lat.level_offset(l) + static_cast<std::size_t>(k);
                for (auto part : {samples.region(r), samples.top(r)})
                    for (const Sample& s : part) {
                        const double d = std::max({q.lower(0) - s.x, s.x - q.upper(0), 0.0});
                        if (s.t > floor_t + d) {
                            sup = std::max(sup, std::abs(s.u));
                            ++out.checked;
                        }
                    }
            }
        }
        const double m = maximal[i];
        if (sup > m * (1.0 + 1e-12) + 1e-300) ++out.violations;
        if (m > 0.0) out.worst_ratio = std::max(out.worst_ratio, sup / m);
    }
    return out;
}

std::size_t max_overlap(const WhitneySamples& samples, double delta_prime, double kappa_prime) {
    const Lattice& lat = samples.lattice();
    std::size_t best = 0;
    for (const Sample& s : samples.all()) {
        std::size_t count = 0;
        for (int l = 0; l < lat.levels(); ++l) {
            const double side = std::ldexp(1.0, -lat.generation(l));
            if (!(s.t >= delta_prime * side && s.t < kappa_prime * side)) continue;
            const auto n = static_cast<std::int64_t>(lat.level_size(l));
            const auto home = static_cast<std::int64_t>(std::floor(s.x / side));
            for (std::int64_t k = std::max<std::int64_t>(home - 1, 0); k <= std::min(home + 1, n - 1); ++k) {
                const double c = (static_cast<double>(k) + 0.5) * side;
                if (std::abs(s.x - c) < 0.5 * kappa_prime * side) ++count;
            }
        }
        best = std::max(best, count);
    }
    return best;
}

}  // namespace bvx::elliptic
