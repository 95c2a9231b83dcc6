#include "bvx/stopped_square.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "bvx/errors.hpp"
#include "bvx/functionals.hpp"

namespace bvx {
namespace {

void require_match(const GridFunction& g, const StoppingFamily& family) {
    const Lattice& lat = family.lattice();
    if (lat.dim() != g.dim() || lat.depth() != g.depth()) throw ConfigError("family lattice does not match the grid function");
}

std::vector<double> squared_terms(const GridFunction& g, const StoppingFamily& family) {
    const Lattice& lat = family.lattice();
    const std::vector<double> avg = cube_averages(g, lat, false);
    std::vector<double> term(lat.size(), 0.0);
    for (std::size_t i = 0; i < family.size(); ++i) {
        const double d = avg[family.cube_index(i)] - avg[family.cube_index(family.parent(i))];
        term[family.cube_index(i)] = d * d;
    }
    return term;
}

double weighted_sum(const GridFunction& w, const GridFunction& f, double p) {
    double s = 0.0;
    for (std::size_t c = 0; c < f.size(); ++c) s += w[c] * std::pow(std::abs(f[c]), p);
    return s * f.cell_volume();
}

}  // namespace

GridFunction stopped_square(const GridFunction& g, const StoppingFamily& family) {
    require_match(g, family);
    const Lattice& lat = family.lattice();
    const std::vector<double> term = squared_terms(g, family);
    GridFunction out(g.dim(), g.depth());
    for (std::size_t c = 0; c < g.size(); ++c) {
        double s = 0.0;
        for (int l = 0; l < lat.levels(); ++l) s += term[lat.cell_ancestor(c, l)];
        out[c] = std::sqrt(s);
    }
    return out;
}

L2Sides l2_bound_check(const GridFunction& g, const StoppingFamily& family) {
    const double s = lp_norm(stopped_square(g, family), 2.0);
    const double n = lp_norm(g, 2.0);
    return {s * s, n * n};
}

std::vector<GridFunction> martingale_sequence(const GridFunction& g, const StoppingFamily& family) {
    require_match(g, family);
    const Lattice& lat = family.lattice();
    const std::vector<double> avg = cube_averages(g, lat, false);
    const int top = family.size() == 0 ? -1 : family.max_generation();
    std::vector<int> gen(family.size());
    for (std::size_t i = 0; i < family.size(); ++i) gen[i] = family.generation(i);
    std::vector<GridFunction> levels;
    for (int k = 0; k <= top; ++k) {
        GridFunction u = g;
        for (std::size_t c = 0; c < g.size(); ++c) {
            // Members of one generation are disjoint; at most one contains c.
            for (int l = 0; l < lat.levels(); ++l) {
                const std::ptrdiff_t s = family.slot(lat.cell_ancestor(c, l));
                if (s != StoppingFamily::none && gen[static_cast<std::size_t>(s)] == k) {
                    u[c] = avg[lat.cell_ancestor(c, l)];
                    break;
                }
            }
        }
        levels.push_back(std::move(u));
    }
    levels.push_back(g);
    return levels;
}

double martingale_orthogonality_error(const std::vector<GridFunction>& levels) {
    if (levels.empty()) return 0.0;
    const double energy = integral([&] {
        GridFunction sq = levels.back();
        for (double& v : sq.values()) v *= v;
        return sq;
    }());
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
        const GridFunction& a = levels[k];
        const GridFunction& b = levels[k + 1];
        double cross = 0.0;
        double self = 0.0;
        for (std::size_t c = 0; c < a.size(); ++c) {
            cross += a[c] * b[c];
            self += a[c] * a[c];
        }
        cross *= a.cell_volume();
        self *= a.cell_volume();
        const double scale = std::max(self, energy);
        if (scale > 0.0) worst = std::max(worst, std::abs(cross - self) / scale);
    }
    return worst;
}

WeakL1Probe weak_l1_probe(const GridFunction& g, const StoppingFamily& family, double lambda) {
    if (!(lambda > 0.0)) throw ConfigError("lambda must be > 0");
    const GridFunction s = stopped_square(g, family);
    double count = 0.0;
    for (double v : s.values())
        if (v > lambda) count += 1.0;
    return {count * g.cell_volume(), lp_norm(g, 1.0) / lambda};
}

CzDecomposition cz_decompose(const GridFunction& g, double lambda) {
    if (!(lambda > 0.0)) throw ConfigError("lambda must be > 0");
    const Lattice lat = g.lattice();
    const std::vector<double> abs_avg = cube_averages(g, lat, true);
    const std::vector<double> avg = cube_averages(g, lat, false);
    // selected[i]: some lattice ancestor (inclusive) has avg |g| > lambda.
    std::vector<char> covered(lat.size(), 0);
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < lat.size(); ++i) {
        const bool above = lat.level_of(i) > 0 && covered[lat.parent_index(i)];
        if (above) {
            covered[i] = 1;
        } else if (abs_avg[i] > lambda) {
            covered[i] = 1;
            chosen.push_back(i);
        }
    }
    CzDecomposition out{g, {}};
    const int finest = lat.levels() - 1;
    std::vector<std::ptrdiff_t> cell_owner(g.size(), -1);
    for (std::size_t c = 0; c < g.size(); ++c)
        for (int l = 0; l <= finest; ++l) {
            const std::size_t a = lat.cell_ancestor(c, l);
            if (covered[a]) {
                cell_owner[c] = static_cast<std::ptrdiff_t>(a);
                break;
            }
        }
    std::vector<std::size_t> position(lat.size(), 0);
    for (std::size_t k = 0; k < chosen.size(); ++k) {
        position[chosen[k]] = k;
        out.bad.push_back({chosen[k], GridFunction(g.dim(), g.depth())});
    }
    for (std::size_t c = 0; c < g.size(); ++c) {
        if (cell_owner[c] < 0) continue;
        const auto q = static_cast<std::size_t>(cell_owner[c]);
        out.good[c] = avg[q];
        out.bad[position[q]].b[c] = g[c] - avg[q];
    }
    return out;
}

Weight make_weight(const GridFunction& raw) {
    Weight w{raw, 0};
    for (double& v : w.values.values()) {
        if (!(v >= 1e-15)) {
            if (std::isnan(v) || v < 0.0) throw ConfigError("weights must be non-negative");
            v = 1e-15;
            ++w.clamped;
        }
    }
    return w;
}

double aq_characteristic(const Weight& w, double q) {
    if (!(q > 1.0)) throw ConfigError("A_q requires q > 1");
    const double qp = q / (q - 1.0);
    GridFunction dual = w.values;
    for (double& v : dual.values()) v = std::pow(v, 1.0 - qp);
    const Lattice lat = w.values.lattice();
    const std::vector<double> a = cube_averages(w.values, lat, false);
    const std::vector<double> b = cube_averages(dual, lat, false);
    double best = 0.0;
    for (std::size_t i = 0; i < lat.size(); ++i) best = std::max(best, a[i] * std::pow(b[i], q - 1.0));
    return best;
}

WeightedSides weighted_sf_check(const GridFunction& g, const StoppingFamily& family, const Weight& w, double p) {
    if (!(p >= 1.0)) throw ConfigError("p must be >= 1");
    const GridFunction s = stopped_square(g, family);
    const GridFunction m = maximal_dyadic(g);
    return {std::pow(weighted_sum(w.values, s, p), 1.0 / p), std::pow(weighted_sum(w.values, m, p), 1.0 / p)};
}

GoodLambdaSides good_lambda_probe(const GridFunction& g, const StoppingFamily& family, const Weight& w, double lambda,
                                  double gamma) {
    if (!(lambda > 0.0)) throw ConfigError("lambda must be > 0");
    if (!(gamma > 0.0 && gamma < 0.5)) throw ConfigError("gamma must lie in (0, 1/2)");
    const GridFunction s = stopped_square(g, family);
    const GridFunction m = maximal_dyadic(g);
    GoodLambdaSides out{0.0, 0.0};
    for (std::size_t c = 0; c < g.size(); ++c) {
        if (s[c] > 2.0 * lambda && m[c] < gamma * lambda) out.lhs += w.values[c];
        if (s[c] > lambda) out.rhs += w.values[c];
    }
    out.lhs *= g.cell_volume();
    out.rhs *= g.cell_volume();
    return out;
}

StoppingFamily random_family(const Lattice& lattice, double density, std::uint64_t seed) {
    if (!(density >= 0.0 && density <= 1.0)) throw ConfigError("family density must lie in [0, 1]");
    std::mt19937_64 rng(seed);
    StoppingFamily family(lattice);
    for (std::size_t i = 0; i < lattice.size(); ++i) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        if (u < density) family.insert(i);
    }
    return family;
}

}  // namespace bvx
