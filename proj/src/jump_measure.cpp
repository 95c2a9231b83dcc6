#include "bvx/jump_measure.hpp"

#include <algorithm>
#include <cmath>

#include "bvx/errors.hpp"

namespace bvx {

double JumpMeasure::vertical_total() const {
    double s = 0.0;
    for (const auto& v : vertical) s += v.mass;
    return s;
}

double JumpMeasure::lateral_total() const {
    double s = 0.0;
    for (const auto& l : lateral) s += l.mass;
    return s;
}

double JumpMeasure::region_total() const {
    double s = 0.0;
    for (const auto& r : region) s += r.mass;
    return s;
}

namespace {

/// Face area of a lateral Whitney face: thickness times l^{n-1}.
double lateral_face_area(const Lattice& lat, const DyadicCube& q) {
    return lat.whitney_fraction() * q.side() * std::ldexp(1.0, -(q.n - 1) * q.j);
}

}  // namespace

JumpMeasure gradient_measure(const WhitneyFunction& f, GradientPart part) {
    const Lattice& lat = f.lattice();
    JumpMeasure mu(lat);
    const bool want_vertical = part != GradientPart::lateral;
    const bool want_lateral = part != GradientPart::vertical;
    if (want_vertical) mu.outer_top = std::abs(f[0]);
    for (int level = 0; level < lat.levels(); ++level) {
        const int g = lat.generation(level);
        const std::uint32_t last = (std::uint32_t{1} << g) - 1;
        for (std::size_t local = 0; local < lat.level_size(level); ++local) {
            const std::size_t idx = lat.level_offset(level) + local;
            const DyadicCube q = lat.cube(idx);
            if (want_vertical && level > 0) {
                const double jump = std::abs(f[idx] - f[lat.parent_index(idx)]);
                if (jump > 0.0) mu.vertical.push_back({idx, jump * q.volume()});
            }
            if (!want_lateral) continue;
            const double area = lateral_face_area(lat, q);
            for (int axis = 0; axis < q.n; ++axis) {
                if (q.k[axis] == 0) mu.outer_lateral += std::abs(f[idx]) * area;
                if (q.k[axis] == last) {
                    mu.outer_lateral += std::abs(f[idx]) * area;
                    continue;
                }
                DyadicCube nb = q;
                nb.k[axis] += 1;
                const std::size_t nidx = lat.index(nb);
                const double jump = std::abs(f[idx] - f[nidx]);
                if (jump > 0.0) mu.lateral.push_back({idx, nidx, axis, jump * area});
            }
        }
    }
    return mu;
}

JumpMeasure region_measure(const WhitneyFunction& f) {
    const Lattice& lat = f.lattice();
    JumpMeasure mu(lat);
    for (std::size_t i = 0; i < lat.size(); ++i) {
        const double m = std::abs(f[i]) * lat.whitney_volume(lat.cube(i));
        if (m > 0.0) mu.region.push_back({i, m});
    }
    return mu;
}

JumpMeasure merge(const JumpMeasure& a, const JumpMeasure& b) {
    if (!(a.lattice == b.lattice)) throw ConfigError("cannot merge measures on different lattices");
    JumpMeasure out = a;
    out.vertical.insert(out.vertical.end(), b.vertical.begin(), b.vertical.end());
    out.lateral.insert(out.lateral.end(), b.lateral.begin(), b.lateral.end());
    out.region.insert(out.region.end(), b.region.begin(), b.region.end());
    out.outer_top += b.outer_top;
    out.outer_lateral += b.outer_lateral;
    return out;
}

namespace {

double overlap(double a0, double a1, double b0, double b1) { return std::max(0.0, std::min(a1, b1) - std::max(a0, b0)); }

double t_fraction(double t_top, double bottom, double top) {
    return std::clamp((t_top - bottom) / (top - bottom), 0.0, 1.0);
}

double cube_fraction(const DyadicCube& q, const ClosedBox& box, int skip_axis) {
    double frac = 1.0;
    for (int i = 0; i < q.n; ++i) {
        if (i == skip_axis) continue;
        frac *= overlap(q.lower(i), q.upper(i), box.lo[i], box.hi[i]) / q.side();
    }
    return frac;
}

}  // namespace

double closed_box_mass(const JumpMeasure& mu, const ClosedBox& box) {
    const Lattice& lat = mu.lattice;
    double total = 0.0;
    for (const auto& v : mu.vertical) {
        const DyadicCube q = lat.cube(v.child);
        if (q.side() <= box.t_top) total += v.mass * cube_fraction(q, box, -1);
    }
    for (const auto& l : mu.lateral) {
        const DyadicCube q = lat.cube(l.low);
        const double e = q.upper(l.axis);
        if (e < box.lo[l.axis] || e > box.hi[l.axis]) continue;
        total += l.mass * t_fraction(box.t_top, lat.whitney_bottom(q), q.side()) * cube_fraction(q, box, l.axis);
    }
    for (const auto& r : mu.region) {
        const DyadicCube q = lat.cube(r.cube);
        total += r.mass * t_fraction(box.t_top, lat.whitney_bottom(q), q.side()) * cube_fraction(q, box, -1);
    }
    return total;
}

std::vector<double> carleson_box_masses(const JumpMeasure& mu) {
    const Lattice& lat = mu.lattice;
    std::vector<double> node(lat.size(), 0.0);
    for (const auto& v : mu.vertical) node[v.child] += v.mass;
    for (const auto& r : mu.region) node[r.cube] += r.mass;
    // A lateral face lies in the closed box of Q iff low or high is inside Q:
    // inclusion-exclusion puts +m on each side and -m at their common ancestor.
    for (const auto& l : mu.lateral) {
        node[l.low] += l.mass;
        node[l.high] += l.mass;
        node[lat.common_ancestor(l.low, l.high)] -= l.mass;
    }
    for (int level = lat.levels() - 1; level > 0; --level) {
        const std::size_t begin = lat.level_offset(level);
        const std::size_t end = begin + lat.level_size(level);
        for (std::size_t i = begin; i < end; ++i) node[lat.parent_index(i)] += node[i];
    }
    return node;
}

ClosedBox carleson_box(const DyadicCube& q) {
    ClosedBox b;
    b.t_top = q.side();
    for (int i = 0; i < q.n; ++i) {
        b.lo[i] = q.lower(i);
        b.hi[i] = q.upper(i);
    }
    return b;
}

}  // namespace bvx
