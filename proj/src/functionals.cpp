#include "bvx/functionals.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "bvx/errors.hpp"
#include "bvx/quadrature.hpp"

namespace bvx {
namespace {

GridFunction chain_max(const Lattice& lat, const std::vector<double>& per_cube) {
    GridFunction out(lat.dim(), lat.depth());
    for (std::size_t c = 0; c < lat.cell_count(); ++c) {
        double m = 0.0;
        for (int l = 0; l < lat.levels(); ++l) m = std::max(m, per_cube[lat.cell_ancestor(c, l)]);
        out[c] = m;
    }
    return out;
}

GridFunction chain_sum(const Lattice& lat, const std::vector<double>& per_cube) {
    GridFunction out(lat.dim(), lat.depth());
    for (std::size_t c = 0; c < lat.cell_count(); ++c) {
        double s = 0.0;
        for (int l = 0; l < lat.levels(); ++l) s += per_cube[lat.cell_ancestor(c, l)];
        out[c] = s;
    }
    return out;
}

/// Per-cube aggregation of a measure's interior terms.
struct MeasureDensity {
    std::vector<double> vertical;
    std::vector<double> region;
    std::array<std::vector<double>, kMaxDim> lateral_plus;

    explicit MeasureDensity(const JumpMeasure& mu) {
        const std::size_t size = mu.lattice.size();
        vertical.assign(size, 0.0);
        region.assign(size, 0.0);
        for (auto& v : lateral_plus) v.assign(size, 0.0);
        for (const auto& v : mu.vertical) vertical[v.child] += v.mass;
        for (const auto& r : mu.region) region[r.cube] += r.mass;
        for (const auto& l : mu.lateral) lateral_plus[static_cast<std::size_t>(l.axis)][l.low] += l.mass;
    }
};

double overlap(double a0, double a1, double b0, double b1) { return std::max(0.0, std::min(a1, b1) - std::max(a0, b0)); }

/// Closed-box mass using per-level index ranges instead of a full scan.
double indexed_box_mass(const Lattice& lat, const MeasureDensity& d, const ClosedBox& box) {
    const int n = lat.dim();
    double total = 0.0;
    for (int l = 0; l < lat.levels(); ++l) {
        const int g = lat.generation(l);
        const double side = std::ldexp(1.0, -g);
        const double bottom = std::ldexp(side, -lat.step());
        const double tf = std::clamp((box.t_top - bottom) / (side - bottom), 0.0, 1.0);
        const bool vertical_in = side <= box.t_top;
        if (!vertical_in && tf <= 0.0) continue;
        const std::int64_t last = (std::int64_t{1} << g) - 1;
        std::array<std::int64_t, kMaxDim> lo{0, 0};
        std::array<std::int64_t, kMaxDim> hi{0, 0};
        for (int a = 0; a < n; ++a) {
            lo[a] = std::clamp(static_cast<std::int64_t>(std::floor(box.lo[a] / side)) - 1, std::int64_t{0}, last);
            hi[a] = std::clamp(static_cast<std::int64_t>(std::floor(box.hi[a] / side)) + 1, std::int64_t{0}, last);
        }
        for (std::int64_t k0 = lo[0]; k0 <= hi[0]; ++k0) {
            for (std::int64_t k1 = lo[1]; k1 <= hi[1]; ++k1) {
                const std::array<std::int64_t, kMaxDim> k{k0, k1};
                std::array<double, kMaxDim> frac{1.0, 1.0};
                for (int a = 0; a < n; ++a) frac[a] = overlap(k[a] * side, (k[a] + 1) * side, box.lo[a], box.hi[a]) / side;
                const std::size_t local = n == 1 ? static_cast<std::size_t>(k0)
                                                 : ((static_cast<std::size_t>(k0) << g) | static_cast<std::size_t>(k1));
                const std::size_t idx = lat.level_offset(l) + local;
                const double volume_frac = frac[0] * (n == 2 ? frac[1] : 1.0);
                if (vertical_in) total += d.vertical[idx] * volume_frac;
                total += tf * d.region[idx] * volume_frac;
                for (int a = 0; a < n; ++a) {
                    const double m = d.lateral_plus[static_cast<std::size_t>(a)][idx];
                    if (m == 0.0) continue;
                    const double e = (k[a] + 1) * side;
                    if (e < box.lo[a] || e > box.hi[a]) continue;
                    const double other = n == 2 ? frac[1 - a] : 1.0;
                    total += tf * m * other;
                }
            }
        }
    }
    return total;
}

GridFunction carleson_brute_1d(const JumpMeasure& mu) {
    const Lattice& lat = mu.lattice;
    if (lat.dim() != 1) throw ConfigError("brute-force Carleson functional requires n = 1");
    const MeasureDensity d(mu);
    const std::size_t cells = lat.cell_count();
    const double h = std::ldexp(1.0, -lat.depth());

    struct Level {
        double side;
        double bottom;
        std::size_t width;  // cells per cube
        std::size_t count;  // cubes in the generation
        std::vector<double> pv, pr, pe;
    };
    std::vector<Level> levels;
    for (int l = 0; l < lat.levels(); ++l) {
        const int g = lat.generation(l);
        Level lv;
        lv.side = std::ldexp(1.0, -g);
        lv.bottom = std::ldexp(lv.side, -lat.step());
        lv.width = std::size_t{1} << (lat.depth() - g);
        lv.count = std::size_t{1} << g;
        lv.pv.assign(lv.count + 1, 0.0);
        lv.pr.assign(lv.count + 1, 0.0);
        lv.pe.assign(lv.count + 1, 0.0);
        const std::size_t off = lat.level_offset(l);
        for (std::size_t k = 0; k < lv.count; ++k) {
            lv.pv[k + 1] = lv.pv[k] + d.vertical[off + k];
            lv.pr[k + 1] = lv.pr[k] + d.region[off + k];
            // Edge m = k + 1 sits on the right side of cube k.
            lv.pe[k + 1] = lv.pe[k] + d.lateral_plus[0][off + k];
        }
        levels.push_back(std::move(lv));
    }

    auto covered = [](const Level& lv, const std::vector<double>& p, std::size_t a, std::size_t b) {
        const std::size_t w = lv.width;
        const std::size_t klo = a / w;
        const std::size_t khi = (b - 1) / w;
        auto value = [&](std::size_t k) { return p[k + 1] - p[k]; };
        if (klo == khi) return value(klo) * static_cast<double>(b - a) / static_cast<double>(w);
        return value(klo) * static_cast<double>((klo + 1) * w - a) / static_cast<double>(w) +
               value(khi) * static_cast<double>(b - khi * w) / static_cast<double>(w) + (p[khi] - p[klo + 1]);
    };

    auto normalized_mass = [&](std::size_t a, std::size_t b) {
        const double len = static_cast<double>(b - a) * h;
        double mass = 0.0;
        for (const Level& lv : levels) {
            if (lv.side <= len) mass += covered(lv, lv.pv, a, b);
            const double tf = std::clamp((len - lv.bottom) / (lv.side - lv.bottom), 0.0, 1.0);
            if (tf <= 0.0) continue;
            mass += tf * covered(lv, lv.pr, a, b);
            const std::size_t mlo = std::max<std::size_t>(1, (a + lv.width - 1) / lv.width);
            const std::size_t mhi = std::min(lv.count - 1, b / lv.width);
            // pe[m] accumulates edges 1..m.
            if (mlo <= mhi) mass += tf * (lv.pe[mhi] - lv.pe[mlo - 1]);
        }
        return mass / len;
    };

    GridFunction out(1, lat.depth());
    std::vector<double> suffix(cells + 2, 0.0);
    for (std::size_t a = 0; a < cells; ++a) {
        suffix[cells + 1] = 0.0;
        for (std::size_t b = cells; b > a; --b) suffix[b] = std::max(suffix[b + 1], normalized_mass(a, b));
        for (std::size_t c = a; c < cells; ++c) out[c] = std::max(out[c], suffix[c + 1]);
    }
    return out;
}

/// Integral over t in (lo, hi) of t^{-1} |[q0, q1] cap (x - a t, x + a t)| dt, exact.
double cone_weight_1d(double x, double q0, double q1, double lo, double hi, double aperture) {
    std::array<double, 6> cuts{lo, hi, (q0 - x) / aperture, (q1 - x) / aperture, (x - q0) / aperture, (x - q1) / aperture};
    std::sort(cuts.begin(), cuts.end());
    auto length = [&](double t) { return std::max(0.0, std::min(q1, x + aperture * t) - std::max(q0, x - aperture * t)); };
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double t1 = std::max(cuts[i], lo);
        const double t2 = std::min(cuts[i + 1], hi);
        if (!(t2 > t1)) continue;
        // Linear on the piece: recover slope and intercept from two interior points.
        const double s1 = t1 + 0.25 * (t2 - t1);
        const double s2 = t1 + 0.75 * (t2 - t1);
        const double slope = (length(s2) - length(s1)) / (s2 - s1);
        const double intercept = length(s1) - slope * s1;
        total += intercept * std::log(t2 / t1) + slope * (t2 - t1);
    }
    return total;
}

/// Area of [q0,q1] x [r0,r1] intersected with the disk of radius r about (x, y).
double square_disk_area(double x, double y, double r, double q0, double q1, double r0, double r1) {
    const double a = std::max(q0, x - r);
    const double b = std::min(q1, x + r);
    if (!(b > a)) return 0.0;
    std::array<double, 6> cuts{a, b, a, b, a, b};
    std::size_t m = 2;
    for (double yy : {r0, r1}) {
        const double dy = yy - y;
        if (std::abs(dy) < r) {
            const double w = std::sqrt(r * r - dy * dy);
            cuts[m++] = std::clamp(x - w, a, b);
            cuts[m++] = std::clamp(x + w, a, b);
        }
    }
    std::sort(cuts.begin(), cuts.begin() + static_cast<std::ptrdiff_t>(m));
    const GaussRule& rule = gauss_rule(16);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        if (!(cuts[i + 1] > cuts[i])) continue;
        total += integrate(rule, cuts[i], cuts[i + 1], [&](double s) {
            const double w = std::sqrt(std::max(0.0, r * r - (s - x) * (s - x)));
            return overlap(y - w, y + w, r0, r1);
        });
    }
    return total;
}

}  // namespace

std::vector<double> truncated_maximal(const GridFunction& g, const Lattice& lattice) {
    std::vector<double> m = cube_averages(g, lattice, true);
    for (int l = 1; l < lattice.levels(); ++l) {
        const std::size_t begin = lattice.level_offset(l);
        const std::size_t end = begin + lattice.level_size(l);
        for (std::size_t i = begin; i < end; ++i) m[i] = std::max(m[i], m[lattice.parent_index(i)]);
    }
    return m;
}

GridFunction lattice_maximal(const GridFunction& g, const Lattice& lattice) {
    const std::vector<double> m = truncated_maximal(g, lattice);
    GridFunction out(g.dim(), g.depth());
    const int finest = lattice.levels() - 1;
    for (std::size_t c = 0; c < g.size(); ++c) out[c] = m[lattice.cell_ancestor(c, finest)];
    return out;
}

GridFunction maximal_dyadic(const GridFunction& g) { return lattice_maximal(g, g.lattice()); }

double maximal_truncated(const GridFunction& g, const DyadicCube& q) {
    const Lattice lat = g.lattice();
    const std::vector<double> avg = cube_averages(g, lat, true);
    double m = 0.0;
    for (int j = 0; j <= q.j; ++j) m = std::max(m, avg[lat.index(q.ancestor_at(j))]);
    return m;
}

TruncatedMaximalSides truncated_maximal_check(const GridFunction& g, const DyadicCube& q) {
    const double mq = maximal_truncated(g, q);
    if (!(mq > 0.0)) throw std::domain_error("maximal function vanishes on every ancestor of the cube");
    const GridFunction m = maximal_dyadic(g);
    const Lattice lat = g.lattice();
    double rhs = 0.0;
    for (std::size_t c = 0; c < g.size(); ++c)
        if (q.contains(lat.cell_cube(c))) rhs += g.cell_volume() / m[c];
    return {q.volume() / mq, 4.0 * rhs};
}

GridFunction nontangential_max(const WhitneyFunction& f, double aperture) {
    if (!(aperture > 0.0)) throw ConfigError("aperture must be > 0");
    const Lattice& lat = f.lattice();
    const int n = lat.dim();
    GridFunction out(n, lat.depth());
    std::array<double, kMaxDim> x{0.0, 0.0};
    for (std::size_t c = 0; c < lat.cell_count(); ++c) {
        for (int a = 0; a < n; ++a) x[a] = out.cell_center(c, a);
        double best = 0.0;
        for (int l = 0; l < lat.levels(); ++l) {
            const int g = lat.generation(l);
            const double side = std::ldexp(1.0, -g);
            const double reach = aperture * side;
            const std::int64_t last = (std::int64_t{1} << g) - 1;
            std::array<std::int64_t, kMaxDim> lo{0, 0};
            std::array<std::int64_t, kMaxDim> hi{0, 0};
            for (int a = 0; a < n; ++a) {
                lo[a] = std::clamp(static_cast<std::int64_t>(std::floor((x[a] - reach) / side)), std::int64_t{0}, last);
                hi[a] = std::clamp(static_cast<std::int64_t>(std::floor((x[a] + reach) / side)), std::int64_t{0}, last);
            }
            for (std::int64_t k0 = lo[0]; k0 <= hi[0]; ++k0)
                for (std::int64_t k1 = lo[1]; k1 <= hi[1]; ++k1) {
                    const DyadicCube q{n, g, {static_cast<std::uint32_t>(k0), static_cast<std::uint32_t>(k1)}};
                    if (!(distance(q, std::span<const double>(x.data(), static_cast<std::size_t>(n))) < reach)) continue;
                    best = std::max(best, std::abs(f[lat.level_offset(l) + lat.local_index(q)]));
                }
        }
        out[c] = best;
    }
    return out;
}

GridFunction nontangential_max_dyadic(const WhitneyFunction& f) {
    std::vector<double> a(f.values().begin(), f.values().end());
    for (double& v : a) v = std::abs(v);
    return chain_max(f.lattice(), a);
}

GridFunction carleson_dyadic(const WhitneyFunction& f) {
    const Lattice& lat = f.lattice();
    std::vector<double> box(lat.size());
    for (std::size_t i = 0; i < lat.size(); ++i) box[i] = std::abs(f[i]) * lat.whitney_volume(lat.cube(i));
    for (int l = lat.levels() - 1; l > 0; --l) {
        const std::size_t begin = lat.level_offset(l);
        for (std::size_t i = begin; i < begin + lat.level_size(l); ++i) box[lat.parent_index(i)] += box[i];
    }
    for (std::size_t i = 0; i < lat.size(); ++i) box[i] /= lat.cube(i).volume();
    return chain_max(lat, box);
}

GridFunction carleson_of_gradient(const JumpMeasure& mu, CarlesonMode mode) {
    if (mode == CarlesonMode::brute) return carleson_brute_1d(mu);
    const Lattice& lat = mu.lattice;
    std::vector<double> box = carleson_box_masses(mu);
    for (std::size_t i = 0; i < lat.size(); ++i) box[i] /= lat.cube(i).volume();
    return chain_max(lat, box);
}

GridFunction carleson_shifted(const JumpMeasure& mu) {
    const Lattice& lat = mu.lattice;
    const int n = lat.dim();
    const MeasureDensity d(mu);
    GridFunction out = carleson_of_gradient(mu, CarlesonMode::dyadic);
    const unsigned shifts = 1U << n;
    const double h = std::ldexp(1.0, -lat.depth());
    const std::int64_t cells_per_axis = std::int64_t{1} << lat.depth();
    for (int g = 0; g <= lat.depth(); ++g) {
        const double side = std::ldexp(1.0, -g);
        const double sign = (g % 2 == 0) ? 1.0 : -1.0;
        for (unsigned s = 1; s < shifts; ++s) {
            std::array<double, kMaxDim> shift{0.0, 0.0};
            for (int a = 0; a < n; ++a)
                if ((s >> a) & 1U) shift[a] = sign / 3.0;
            // Cubes (k + shift) * side meeting [0,1)^n.
            std::array<std::int64_t, kMaxDim> klo{0, 0};
            std::array<std::int64_t, kMaxDim> khi{0, 0};
            for (int a = 0; a < n; ++a) {
                klo[a] = static_cast<std::int64_t>(std::floor(-shift[a])) - 1;
                khi[a] = (std::int64_t{1} << g) + 1;
            }
            for (std::int64_t k0 = klo[0]; k0 <= khi[0]; ++k0)
                for (std::int64_t k1 = klo[1]; k1 <= khi[1]; ++k1) {
                    ClosedBox box;
                    box.t_top = side;
                    const std::array<std::int64_t, kMaxDim> k{k0, k1};
                    bool meets = true;
                    for (int a = 0; a < n; ++a) {
                        box.lo[a] = (static_cast<double>(k[a]) + shift[a]) * side;
                        box.hi[a] = box.lo[a] + side;
                        if (box.hi[a] <= 0.0 || box.lo[a] >= 1.0) meets = false;
                    }
                    if (!meets) continue;
                    const double value = indexed_box_mass(lat, d, box) / std::pow(side, n);
                    // Cells whose centers (i + 1/2) h fall in [lo, hi).
                    std::array<std::int64_t, kMaxDim> clo{0, 0};
                    std::array<std::int64_t, kMaxDim> chi{0, 0};
                    for (int a = 0; a < n; ++a) {
                        clo[a] = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(box.lo[a] / h - 0.5)));
                        chi[a] = std::min<std::int64_t>(cells_per_axis - 1,
                                                        static_cast<std::int64_t>(std::ceil(box.hi[a] / h - 0.5)) - 1);
                    }
                    for (std::int64_t i0 = clo[0]; i0 <= chi[0]; ++i0)
                        for (std::int64_t i1 = clo[1]; i1 <= chi[1]; ++i1) {
                            const std::size_t c = n == 1 ? static_cast<std::size_t>(i0)
                                                         : static_cast<std::size_t>(i0) * static_cast<std::size_t>(cells_per_axis) +
                                                               static_cast<std::size_t>(i1);
                            out[c] = std::max(out[c], value);
                        }
                }
        }
    }
    return out;
}

GridFunction area_dyadic(const WhitneyFunction& f) {
    const Lattice& lat = f.lattice();
    std::vector<double> a(lat.size());
    for (std::size_t i = 0; i < lat.size(); ++i) a[i] = std::abs(f[i]) * lat.cube(i).side();
    return chain_sum(lat, a);
}

WhitneyFunction attributed_density(const JumpMeasure& mu) {
    const Lattice& lat = mu.lattice;
    WhitneyFunction d(lat);
    for (const auto& v : mu.vertical) d[v.child] += v.mass;
    for (const auto& r : mu.region) d[r.cube] += r.mass;
    for (const auto& l : mu.lateral) {
        d[l.low] += 0.5 * l.mass;
        d[l.high] += 0.5 * l.mass;
    }
    for (std::size_t i = 0; i < lat.size(); ++i) d[i] /= lat.whitney_volume(lat.cube(i));
    return d;
}

GridFunction area_dyadic(const JumpMeasure& mu) { return area_dyadic(attributed_density(mu)); }

GridFunction area_cone(const WhitneyFunction& f, double aperture) {
    if (!(aperture > 0.0)) throw ConfigError("aperture must be > 0");
    const Lattice& lat = f.lattice();
    const int n = lat.dim();
    GridFunction out(n, lat.depth());
    const GaussRule& rule = gauss_rule(8);
    std::array<double, kMaxDim> x{0.0, 0.0};
    for (std::size_t c = 0; c < lat.cell_count(); ++c) {
        for (int a = 0; a < n; ++a) x[a] = out.cell_center(c, a);
        double total = 0.0;
        for (int l = 0; l < lat.levels(); ++l) {
            const int g = lat.generation(l);
            const double side = std::ldexp(1.0, -g);
            const double bottom = std::ldexp(side, -lat.step());
            const double reach = aperture * side;
            const std::int64_t last = (std::int64_t{1} << g) - 1;
            std::array<std::int64_t, kMaxDim> lo{0, 0};
            std::array<std::int64_t, kMaxDim> hi{0, 0};
            for (int a = 0; a < n; ++a) {
                lo[a] = std::clamp(static_cast<std::int64_t>(std::floor((x[a] - reach) / side)), std::int64_t{0}, last);
                hi[a] = std::clamp(static_cast<std::int64_t>(std::floor((x[a] + reach) / side)), std::int64_t{0}, last);
            }
            for (std::int64_t k0 = lo[0]; k0 <= hi[0]; ++k0)
                for (std::int64_t k1 = lo[1]; k1 <= hi[1]; ++k1) {
                    const DyadicCube q{n, g, {static_cast<std::uint32_t>(k0), static_cast<std::uint32_t>(k1)}};
                    const double v = std::abs(f[lat.level_offset(l) + lat.local_index(q)]);
                    if (v == 0.0) continue;
                    double w = 0.0;
                    if (n == 1) {
                        w = cone_weight_1d(x[0], q.lower(0), q.upper(0), bottom, side, aperture);
                    } else {
                        w = integrate(rule, bottom, side, [&](double t) {
                            return square_disk_area(x[0], x[1], aperture * t, q.lower(0), q.upper(0), q.lower(1),
                                                    q.upper(1)) /
                                   (t * t);
                        });
                    }
                    total += v * w;
                }
        }
        out[c] = total;
    }
    return out;
}

GridFunction area_cone(const JumpMeasure& mu, double aperture) { return area_cone(attributed_density(mu), aperture); }

ApertureRatios aperture_ratio_report(const WhitneyFunction& f, double alpha, double beta, double p) {
    const double na = lp_norm(nontangential_max(f, alpha), p);
    const double nb = lp_norm(nontangential_max(f, beta), p);
    const double aa = lp_norm(area_cone(f, alpha), p);
    const double ab = lp_norm(area_cone(f, beta), p);
    if (!(nb > 0.0) || !(ab > 0.0)) throw std::domain_error("aperture ratio undefined for a vanishing function");
    return {na / nb, aa / ab};
}

DyadicRatios dyadic_vs_nondyadic_report(const WhitneyFunction& f, double p) {
    const double nd = lp_norm(nontangential_max_dyadic(f), p);
    const double cd = lp_norm(carleson_dyadic(f), p);
    const double ad = lp_norm(area_dyadic(f), p);
    if (!(nd > 0.0) || !(cd > 0.0) || !(ad > 0.0)) throw std::domain_error("dyadic ratio undefined for a vanishing function");
    const JumpMeasure mass = region_measure(f);
    const GridFunction c = f.lattice().dim() == 1 ? carleson_of_gradient(mass, CarlesonMode::brute) : carleson_shifted(mass);
    return {lp_norm(nontangential_max(f, 1.0), p) / nd, lp_norm(c, p) / cd, lp_norm(area_cone(f, 1.0), p) / ad};
}

}  // namespace bvx
