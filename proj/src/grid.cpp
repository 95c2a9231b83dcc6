#include "bvx/grid.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "bvx/errors.hpp"
#include "bvx/kernels.hpp"

namespace bvx {

GridFunction::GridFunction(int n, int depth) : GridFunction(n, depth, std::vector<double>(Lattice::full(n, depth).cell_count(), 0.0)) {}

GridFunction::GridFunction(int n, int depth, std::vector<double> values)
    : n_(n), depth_(depth), values_(std::move(values)) {
    const Lattice lat = Lattice::full(n, depth);
    if (values_.size() != lat.cell_count())
        throw ConfigError("grid function length " + std::to_string(values_.size()) + " does not match 2^(nJ) = " +
                          std::to_string(lat.cell_count()));
    for (double v : values_)
        if (!std::isfinite(v)) throw ConfigError("grid function contains a non-finite value");
}

double GridFunction::cell_volume() const { return std::ldexp(1.0, -n_ * depth_); }

double GridFunction::cell_center(std::size_t i, int axis) const {
    if (n_ == 1) return std::ldexp(static_cast<double>(i) + 0.5, -depth_);
    const std::size_t k = axis == 0 ? (i >> depth_) : (i & ((std::size_t{1} << depth_) - 1));
    return std::ldexp(static_cast<double>(k) + 0.5, -depth_);
}

double lp_norm(const GridFunction& g, double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw ConfigError("Lp exponent must lie in [1, inf)");
    const auto v = g.values();
    double s = 0.0;
    if (p == 1.0) {
        s = kernels::sum_abs(v);
    } else if (p == 2.0) {
        s = kernels::sum_squares(v);
    } else {
        for (double x : v) s += std::pow(std::abs(x), p);
    }
    return std::pow(s * g.cell_volume(), 1.0 / p);
}

double integral(const GridFunction& g) { return kernels::sum(g.values()) * g.cell_volume(); }

double mean(const GridFunction& g) { return integral(g); }

namespace {
template <class Op>
GridFunction combine(const GridFunction& a, const GridFunction& b, Op op) {
    if (!a.same_shape(b)) throw ConfigError("grid functions differ in shape");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(a[i], b[i]);
    return GridFunction(a.dim(), a.depth(), std::move(out));
}
}  // namespace

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
    return combine(a, b, [](double x, double y) { return x - y; });
}
GridFunction operator+(const GridFunction& a, const GridFunction& b) {
    return combine(a, b, [](double x, double y) { return x + y; });
}
GridFunction operator*(double c, const GridFunction& a) {
    std::vector<double> out(a.values().begin(), a.values().end());
    for (double& x : out) x *= c;
    return GridFunction(a.dim(), a.depth(), std::move(out));
}

std::vector<double> cube_averages(const GridFunction& g, const Lattice& lattice, bool absolute) {
    if (lattice.dim() != g.dim() || lattice.depth() != g.depth()) throw ConfigError("lattice does not match grid function");
    const int n = g.dim();
    const int depth = g.depth();
    // Per-generation averages, finest first; each coarser level is the mean of its 2^n children.
    std::vector<double> level(g.values().begin(), g.values().end());
    if (absolute)
        for (double& x : level) x = std::abs(x);
    std::vector<double> out(lattice.size(), 0.0);
    const double scale = std::ldexp(1.0, -n);
    for (int gen = depth; gen >= 0; --gen) {
        if (gen % lattice.step() == 0) {
            const int l = gen / lattice.step();
            std::copy(level.begin(), level.end(), out.begin() + static_cast<std::ptrdiff_t>(lattice.level_offset(l)));
        }
        if (gen == 0) break;
        const std::size_t side = std::size_t{1} << (gen - 1);
        std::vector<double> up(n == 1 ? side : side * side);
        if (n == 1) {
            for (std::size_t k = 0; k < side; ++k) up[k] = (level[2 * k] + level[2 * k + 1]) * scale;
        } else {
            const std::size_t fine = 2 * side;
            for (std::size_t a = 0; a < side; ++a)
                for (std::size_t b = 0; b < side; ++b) {
                    const std::size_t r0 = (2 * a) * fine + 2 * b;
                    const std::size_t r1 = (2 * a + 1) * fine + 2 * b;
                    up[a * side + b] = ((level[r0] + level[r0 + 1]) + (level[r1] + level[r1 + 1])) * scale;
                }
        }
        level.swap(up);
    }
    return out;
}

WhitneyFunction::WhitneyFunction(Lattice lattice, double fill)
    : lattice_(lattice), values_(lattice.size(), fill) {}

WhitneyFunction::WhitneyFunction(Lattice lattice, std::vector<double> values)
    : lattice_(lattice), values_(std::move(values)) {
    if (values_.size() != lattice_.size()) throw ConfigError("Whitney function length does not match its lattice");
}

namespace {
template <class Op>
WhitneyFunction combine(const WhitneyFunction& a, const WhitneyFunction& b, Op op) {
    if (!(a.lattice() == b.lattice())) throw ConfigError("Whitney functions live on different lattices");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(a[i], b[i]);
    return WhitneyFunction(a.lattice(), std::move(out));
}
}  // namespace

WhitneyFunction operator-(const WhitneyFunction& a, const WhitneyFunction& b) {
    return combine(a, b, [](double x, double y) { return x - y; });
}
WhitneyFunction operator+(const WhitneyFunction& a, const WhitneyFunction& b) {
    return combine(a, b, [](double x, double y) { return x + y; });
}
WhitneyFunction operator*(double c, const WhitneyFunction& a) {
    std::vector<double> out(a.values().begin(), a.values().end());
    for (double& x : out) x *= c;
    return WhitneyFunction(a.lattice(), std::move(out));
}

GridFunction read_grid_function(std::istream& in) {
    int n = 0;
    int depth = 0;
    if (!(in >> n >> depth)) throw ConfigError("grid function file: missing 'n J' header");
    if (n < 1 || n > kMaxDim || depth < 0 || n * depth > 24) throw ConfigError("grid function file: header out of range");
    const std::size_t count = std::size_t{1} << (n * depth);
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i)
        if (!(in >> values[i]))
            throw ConfigError("grid function file: expected " + std::to_string(count) + " values, got " + std::to_string(i));
    double extra = 0.0;
    if (in >> extra) throw ConfigError("grid function file: trailing values after 2^(nJ) entries");
    return GridFunction(n, depth, std::move(values));
}

void write_grid_function(std::ostream& out, const GridFunction& g) {
    out << g.dim() << ' ' << g.depth() << '\n' << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t i = 0; i < g.size(); ++i) out << g[i] << '\n';
}

WhitneyFunction read_whitney_function(std::istream& in) {
    int n = 0;
    int depth = 0;
    int step = 0;
    if (!(in >> n >> depth >> step)) throw ConfigError("Whitney file: missing 'n J step' header");
    const Lattice lat(n, depth, step);
    WhitneyFunction f(lat);
    std::vector<char> seen(lat.size(), 0);
    int j = 0;
    while (in >> j) {
        DyadicCube q{n, j, {0, 0}};
        for (int i = 0; i < n; ++i)
            if (!(in >> q.k[i])) throw ConfigError("Whitney file: truncated cube index");
        double v = 0.0;
        if (!(in >> v)) throw ConfigError("Whitney file: missing value");
        if (!lat.admissible(q)) throw ConfigError("Whitney file: cube not admissible on the declared lattice");
        const std::size_t idx = lat.index(q);
        if (seen[idx]) throw ConfigError("Whitney file: duplicate cube");
        seen[idx] = 1;
        f[idx] = v;
    }
    for (char s : seen)
        if (!s) throw ConfigError("Whitney file: some admissible cubes have no value");
    return f;
}

void write_whitney_function(std::ostream& out, const WhitneyFunction& f) {
    const Lattice& lat = f.lattice();
    out << lat.dim() << ' ' << lat.depth() << ' ' << lat.step() << '\n'
        << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t i = 0; i < lat.size(); ++i) {
        const DyadicCube q = lat.cube(i);
        out << q.j;
        for (int a = 0; a < q.n; ++a) out << ' ' << q.k[a];
        out << ' ' << f[i] << '\n';
    }
}

}  // namespace bvx
