#pragma once

// Definitional re-implementations used only as test oracles. Every routine
// here walks cubes and cells directly, with no tree passes or caching, so a
// shared bug with the library would have to be a shared misreading.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <set>
#include <vector>

#include "bvx/dyadic.hpp"
#include "bvx/grid.hpp"

namespace oracle {

using bvx::DyadicCube;
using bvx::GridFunction;
using bvx::Lattice;
using bvx::WhitneyFunction;

// Cells of the depth-J grid lying in q (n = 1 or 2).
inline std::vector<std::size_t> cells_in(const DyadicCube& q, int depth) {
    std::vector<std::size_t> out;
    const std::size_t side = std::size_t{1} << depth;
    const std::size_t w = std::size_t{1} << (depth - q.j);
    const std::size_t x0 = q.k[0] * w;
    if (q.n == 1) {
        for (std::size_t c = x0; c < x0 + w; ++c) out.push_back(c);
        return out;
    }
    const std::size_t y0 = q.k[1] * w;
    for (std::size_t a = x0; a < x0 + w; ++a)
        for (std::size_t b = y0; b < y0 + w; ++b) out.push_back(a * side + b);
    return out;
}

inline double average(const GridFunction& g, const DyadicCube& q, bool absolute) {
    const auto cells = cells_in(q, g.depth());
    double s = 0.0;
    for (std::size_t c : cells) s += absolute ? std::abs(g[c]) : g[c];
    return s / static_cast<double>(cells.size());
}

// Does cube a contain cube b (half-open, inclusive)?
inline bool contains(const DyadicCube& a, const DyadicCube& b) {
    if (b.j < a.j) return false;
    for (int i = 0; i < a.n; ++i)
        if ((b.k[i] >> (b.j - a.j)) != a.k[i]) return false;
    return true;
}

// max over lattice cubes R containing q of avg_R |g|.
inline double truncated_maximal(const GridFunction& g, const Lattice& lat, const DyadicCube& q) {
    double m = 0.0;
    for (std::size_t r = 0; r < lat.size(); ++r) {
        const DyadicCube rc = lat.cube(r);
        if (contains(rc, q)) m = std::max(m, average(g, rc, true));
    }
    return m;
}

// sup over lattice cubes Q of |Q|^{-1} sum of |S| over members S inside Q.
inline double packing(const Lattice& lat, const std::vector<std::size_t>& members) {
    double best = 0.0;
    for (std::size_t q = 0; q < lat.size(); ++q) {
        const DyadicCube qc = lat.cube(q);
        double s = 0.0;
        for (std::size_t m : members)
            if (contains(qc, lat.cube(m))) s += lat.cube(m).volume();
        best = std::max(best, s / qc.volume());
    }
    return best;
}

// C_D f per cell: max over lattice cubes Q containing the cell of
// |Q|^{-1} sum over R inside Q of |f_R| |W_R|.
inline std::vector<double> carleson_dyadic(const WhitneyFunction& f) {
    const Lattice& lat = f.lattice();
    std::vector<double> out(lat.cell_count(), 0.0);
    for (std::size_t c = 0; c < lat.cell_count(); ++c) {
        const DyadicCube cell = lat.cell_cube(c);
        for (std::size_t q = 0; q < lat.size(); ++q) {
            const DyadicCube qc = lat.cube(q);
            if (!contains(qc, cell)) continue;
            double s = 0.0;
            for (std::size_t r = 0; r < lat.size(); ++r)
                if (contains(qc, lat.cube(r))) s += std::abs(f[r]) * lat.whitney_volume(lat.cube(r));
            out[c] = std::max(out[c], s / qc.volume());
        }
    }
    return out;
}

// Generic stopping family by definition: in generation order, a cube joins
// when it is initial, or when C(Q, F) holds for its minimal strict member
// ancestor F.
inline std::set<std::size_t> stopping_family(const Lattice& lat, const std::vector<std::size_t>& initial,
                                             const std::function<bool(std::size_t, std::size_t)>& rule) {
    std::set<std::size_t> members(initial.begin(), initial.end());
    for (std::size_t q = 0; q < lat.size(); ++q) {  // flat order is generation order
        if (members.count(q) != 0) continue;
        const DyadicCube qc = lat.cube(q);
        std::ptrdiff_t owner = -1;
        int owner_gen = -1;
        for (std::size_t m : members) {
            const DyadicCube mc = lat.cube(m);
            if (mc.j < qc.j && contains(mc, qc) && mc.j > owner_gen) {
                owner = static_cast<std::ptrdiff_t>(m);
                owner_gen = mc.j;
            }
        }
        if (owner >= 0 && rule(q, static_cast<std::size_t>(owner))) members.insert(q);
    }
    return members;
}

// Stopping generations of the average rule, member by member: omega(Q) is the
// set of maximal strict descendants R with |u_R - u_Q| >= eps M(R), M(R) > 0.
inline std::set<std::size_t> average_generations(const GridFunction& g, double eps) {
    const Lattice lat = g.lattice();
    std::vector<double> u(lat.size());
    std::vector<double> m(lat.size());
    for (std::size_t q = 0; q < lat.size(); ++q) {
        u[q] = average(g, lat.cube(q), false);
        m[q] = truncated_maximal(g, lat, lat.cube(q));
    }
    auto stops = [&](std::size_t r, std::size_t q) { return m[r] > 0.0 && std::abs(u[r] - u[q]) >= eps * m[r]; };
    std::set<std::size_t> members{0};
    std::vector<std::size_t> frontier{0};
    while (!frontier.empty()) {
        std::vector<std::size_t> next;
        for (std::size_t q : frontier) {
            const DyadicCube qc = lat.cube(q);
            for (std::size_t r = 0; r < lat.size(); ++r) {
                const DyadicCube rc = lat.cube(r);
                if (rc.j <= qc.j || !contains(qc, rc) || !stops(r, q)) continue;
                bool maximal = true;
                for (DyadicCube a = bvx::parent(rc); a.j > qc.j; a = bvx::parent(a))
                    if (stops(lat.index(a), q)) maximal = false;
                if (maximal && members.insert(r).second) next.push_back(r);
            }
        }
        frontier = std::move(next);
    }
    return members;
}

// Dyadic Haar square function (n = 1): sum over dyadic P containing x with
// children of ((avg_left - avg_right) / 2)^2, computed from averages.
inline std::vector<double> haar_square(const GridFunction& g) {
    const Lattice lat = g.lattice();
    std::vector<double> out(g.size(), 0.0);
    for (std::size_t q = 0; q < lat.size(); ++q) {
        const DyadicCube qc = lat.cube(q);
        if (qc.j == g.depth()) continue;
        const double d = 0.5 * (average(g, bvx::child(qc, 0), false) - average(g, bvx::child(qc, 1), false));
        for (std::size_t c : cells_in(qc, g.depth())) out[c] += d * d;
    }
    for (double& v : out) v = std::sqrt(v);
    return out;
}

}  // namespace oracle
