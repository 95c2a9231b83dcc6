#include "bvx/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "bvx/errors.hpp"

namespace bvx {

DyadicCube DyadicCube::ancestor_at(int g) const {
    if (g < 0 || g > j) throw std::out_of_range("ancestor generation outside [0, j]");
    DyadicCube a{n, g, {0, 0}};
    for (int i = 0; i < n; ++i) a.k[i] = k[i] >> (j - g);
    return a;
}

bool DyadicCube::contains(const DyadicCube& other) const {
    if (other.n != n || other.j < j) return false;
    return other.ancestor_at(j) == *this;
}

bool DyadicCube::valid() const {
    if (n < 1 || n > kMaxDim || j < 0 || j > 30) return false;
    for (int i = 0; i < n; ++i)
        if (k[i] >= (std::uint32_t{1} << j)) return false;
    for (int i = n; i < kMaxDim; ++i)
        if (k[i] != 0) return false;
    return true;
}

DyadicCube child(const DyadicCube& q, unsigned which) {
    DyadicCube c{q.n, q.j + 1, {0, 0}};
    // Bit (n-1-i) of `which` selects the upper half along axis i, so the
    // children come out in lexicographic corner order.
    for (int i = 0; i < q.n; ++i) c.k[i] = 2 * q.k[i] + ((which >> (q.n - 1 - i)) & 1U);
    return c;
}

std::vector<DyadicCube> children(const DyadicCube& q, int depth) {
    if (q.j >= depth) throw std::out_of_range("depth exhausted: cube already at the finest generation");
    std::vector<DyadicCube> out;
    const unsigned count = 1U << q.n;
    out.reserve(count);
    for (unsigned i = 0; i < count; ++i) out.push_back(child(q, i));
    return out;
}

DyadicCube parent(const DyadicCube& q) {
    if (q.j == 0) throw std::out_of_range("the unit cube has no parent");
    return q.ancestor_at(q.j - 1);
}

std::vector<DyadicCube> ancestors(const DyadicCube& q) {
    std::vector<DyadicCube> out;
    out.reserve(static_cast<std::size_t>(q.j));
    for (int g = q.j - 1; g >= 0; --g) out.push_back(q.ancestor_at(g));
    return out;
}

std::vector<DyadicCube> same_scale_neighbors(const DyadicCube& q) {
    std::vector<DyadicCube> out;
    const std::int64_t limit = std::int64_t{1} << q.j;
    const int span = q.n == 1 ? 1 : 3;
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < span; ++b) {
            const std::int64_t k0 = static_cast<std::int64_t>(q.k[0]) + a - 1;
            const std::int64_t k1 = q.n == 1 ? 0 : static_cast<std::int64_t>(q.k[1]) + b - 1;
            if (a == 1 && (q.n == 1 || b == 1)) continue;
            if (k0 < 0 || k0 >= limit) continue;
            if (q.n == 2 && (k1 < 0 || k1 >= limit)) continue;
            out.push_back(DyadicCube{q.n, q.j, {static_cast<std::uint32_t>(k0), static_cast<std::uint32_t>(k1)}});
        }
    }
    return out;
}

double distance(const DyadicCube& a, const DyadicCube& b) {
    double s = 0.0;
    for (int i = 0; i < a.n; ++i) {
        const double gap = std::max({0.0, a.lower(i) - b.upper(i), b.lower(i) - a.upper(i)});
        s += gap * gap;
    }
    return std::sqrt(s);
}

double distance(const DyadicCube& q, std::span<const double> x) {
    double s = 0.0;
    for (int i = 0; i < q.n; ++i) {
        const double gap = std::max({0.0, q.lower(i) - x[static_cast<std::size_t>(i)],
                                     x[static_cast<std::size_t>(i)] - q.upper(i)});
        s += gap * gap;
    }
    return std::sqrt(s);
}

DyadicCube skip_parent(const DyadicCube& q, const SkipGrid& grid) {
    if (!grid.admissible(q.j)) throw std::invalid_argument("cube generation is not admissible on this skip grid");
    if (q.j == 0) throw std::out_of_range("generation 0 has no skip parent");
    return q.ancestor_at(q.j - grid.skip);
}

bool inside_shrunk(const DyadicCube& inner, const DyadicCube& outer, double margin_fraction) {
    const double pad = margin_fraction * outer.side();
    for (int i = 0; i < outer.n; ++i)
        if (inner.lower(i) < outer.lower(i) + pad || inner.upper(i) > outer.upper(i) - pad) return false;
    return true;
}

bool outside_shrunk(const DyadicCube& inner, const DyadicCube& outer, double margin_fraction) {
    const double pad = margin_fraction * outer.side();
    for (int i = 0; i < outer.n; ++i)
        if (inner.upper(i) <= outer.lower(i) + pad || inner.lower(i) >= outer.upper(i) - pad) return true;
    return false;
}

void GeometryConfig::validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw ConfigError("geometry." + field + ": " + why);
    };
    if (!(aperture > 0.0)) fail("aperture", "must be > 0");
    if (!(c0 > 1.0)) fail("c0", "must be > 1");
    if (!(c1 > 0.0)) fail("c1", "must be > 0");
    if (skip < 1 || skip > 16) fail("skip", "must lie in [1, 16]");
    if (margin < 1) fail("margin", "must be >= 1");
    if (!(2.0 * margin * delta() < 1.0)) fail("margin", "requires 2 * margin * delta < 1");
    if (!(holder > 0.0 && holder <= 1.0)) fail("holder", "must lie in (0, 1]");
    if (!(eta > 0.0 && eta < 1.0)) fail("eta", "must lie in (0, 1)");
    if (!(delta_prime > 0.0 && delta_prime < delta())) fail("delta_prime", "must lie in (0, delta)");
    if (!(kappa_prime > 1.0)) fail("kappa_prime", "must be > 1");
    if (!(theta > 0.0 && theta < 1.0)) fail("theta", "must lie in (0, 1)");
    if (elliptic && aperture < 1.0 / delta()) fail("aperture", "must be >= 1/delta when the elliptic module is active");
}

GeometryConfig GeometryConfig::defaults(bool elliptic, int skip) {
    GeometryConfig g;
    g.skip = skip;
    g.elliptic = elliptic;
    g.aperture = elliptic ? std::max(1.0, 1.0 / g.delta()) : 1.0;
    g.delta_prime = g.delta() / 2.0;
    g.theta = 1.0 - 2.0 * g.delta();
    // Largest margin below 6 that keeps 2 * margin * delta < 1.
    g.margin = std::min(g.margin, static_cast<int>(std::ceil(0.5 / g.delta())) - 1);
    return g;
}

Lattice::Lattice(int n, int depth, int step) : n_(n), depth_(depth), step_(step) {
    if (n < 1 || n > kMaxDim) throw ConfigError("dimension must be 1 or 2");
    if (depth < 0 || n * depth > 28) throw ConfigError("depth out of range for dimension");
    if (step < 1) throw ConfigError("lattice step must be >= 1");
    levels_ = depth / step + 1;
    offsets_.resize(static_cast<std::size_t>(levels_) + 1);
    offsets_[0] = 0;
    for (int l = 0; l < levels_; ++l) offsets_[static_cast<std::size_t>(l) + 1] = offsets_[static_cast<std::size_t>(l)] + level_size(l);
}

int Lattice::level_of(std::size_t index) const {
    const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), index);
    return static_cast<int>(it - offsets_.begin()) - 1;
}

bool Lattice::admissible(const DyadicCube& q) const {
    return q.n == n_ && q.valid() && q.j <= depth_ && q.j % step_ == 0;
}

std::size_t Lattice::local_index(const DyadicCube& q) const {
    if (n_ == 1) return q.k[0];
    return (static_cast<std::size_t>(q.k[0]) << q.j) | q.k[1];
}

std::size_t Lattice::index(const DyadicCube& q) const {
    if (!admissible(q)) throw std::out_of_range("cube is not admissible on this lattice");
    return level_offset(q.j / step_) + local_index(q);
}

DyadicCube Lattice::cube(std::size_t index) const {
    const int level = level_of(index);
    const std::size_t local = index - level_offset(level);
    const int g = generation(level);
    DyadicCube q{n_, g, {0, 0}};
    if (n_ == 1) {
        q.k[0] = static_cast<std::uint32_t>(local);
    } else {
        q.k[0] = static_cast<std::uint32_t>(local >> g);
        q.k[1] = static_cast<std::uint32_t>(local & ((std::size_t{1} << g) - 1));
    }
    return q;
}

std::size_t Lattice::cell_ancestor(std::size_t cell, int level) const {
    const int g = generation(level);
    const int shift = depth_ - g;
    if (n_ == 1) return level_offset(level) + (cell >> shift);
    const std::size_t mask = (std::size_t{1} << depth_) - 1;
    const std::size_t k0 = (cell >> depth_) >> shift;
    const std::size_t k1 = (cell & mask) >> shift;
    return level_offset(level) + ((k0 << g) | k1);
}

DyadicCube Lattice::cell_cube(std::size_t cell) const {
    DyadicCube q{n_, depth_, {0, 0}};
    if (n_ == 1) {
        q.k[0] = static_cast<std::uint32_t>(cell);
    } else {
        const std::size_t mask = (std::size_t{1} << depth_) - 1;
        q.k[0] = static_cast<std::uint32_t>(cell >> depth_);
        q.k[1] = static_cast<std::uint32_t>(cell & mask);
    }
    return q;
}

std::size_t Lattice::parent_index(std::size_t index) const {
    const int level = level_of(index);
    if (level == 0) throw std::out_of_range("top cube has no lattice parent");
    const std::size_t local = index - level_offset(level);
    const int g = generation(level);
    if (n_ == 1) return level_offset(level - 1) + (local >> step_);
    const std::size_t k0 = local >> g;
    const std::size_t k1 = local & ((std::size_t{1} << g) - 1);
    return level_offset(level - 1) + (((k0 >> step_) << (g - step_)) | (k1 >> step_));
}

std::vector<std::size_t> Lattice::child_indices(std::size_t index) const {
    const DyadicCube q = cube(index);
    if (q.j + step_ > depth_) return {};
    const int g = q.j + step_;
    const std::size_t per_axis = std::size_t{1} << step_;
    const std::size_t base = level_offset(g / step_);
    std::vector<std::size_t> out;
    if (n_ == 1) {
        out.reserve(per_axis);
        for (std::size_t a = 0; a < per_axis; ++a) out.push_back(base + q.k[0] * per_axis + a);
    } else {
        out.reserve(per_axis * per_axis);
        for (std::size_t a = 0; a < per_axis; ++a)
            for (std::size_t b = 0; b < per_axis; ++b) {
                const std::size_t k0 = q.k[0] * per_axis + a;
                const std::size_t k1 = q.k[1] * per_axis + b;
                out.push_back(base + ((k0 << g) | k1));
            }
    }
    return out;
}

std::size_t Lattice::common_ancestor(std::size_t a, std::size_t b) const {
    DyadicCube qa = cube(a);
    DyadicCube qb = cube(b);
    int g = std::min(qa.j, qb.j);
    while (g > 0 && qa.ancestor_at(g) != qb.ancestor_at(g)) g -= step_;
    return index(qa.ancestor_at(g));
}

WhitneyRegion whitney_region(const Lattice& lattice, const DyadicCube& q) {
    if (!lattice.admissible(q)) throw std::out_of_range("cube is not admissible on this lattice");
    return WhitneyRegion{q, lattice.whitney_bottom(q), q.side()};
}

}  // namespace bvx
