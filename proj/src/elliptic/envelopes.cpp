#include "bvx/elliptic/envelopes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "bvx/elliptic/families.hpp"
#include "bvx/errors.hpp"

namespace bvx::elliptic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t cell_of(double x, int depth) {
    return static_cast<std::size_t>(std::ldexp(x, depth));
}

}  // namespace

LipschitzEnvelope::LipschitzEnvelope(Kind kind, double slope, std::vector<Piece> pieces)
    : kind_(kind), slope_(slope), pieces_(std::move(pieces)) {
    if (!(slope > 0.0)) throw ConfigError("envelope slope must be > 0");
    for (const Piece& p : pieces_)
        if (!(p.lo <= p.hi) || !std::isfinite(p.height)) throw ConfigError("malformed envelope piece");
}

double LipschitzEnvelope::operator()(double x) const {
    const std::array<double, 1> one{x};
    return evaluate(one)[0];
}

// Outside a piece the value is affine in x with slope -+L, so each arm is a
// running extremum over pieces sorted by the relevant endpoint; the plateau
// part is the extremum over pieces containing x, kept in a multiset.
std::vector<double> LipschitzEnvelope::evaluate(std::span<const double> xs) const {
    const bool tents = kind_ == Kind::tents;
    const double worst = tents ? -kInf : kInf;
    auto better = [tents](double a, double b) { return tents ? std::max(a, b) : std::min(a, b); };
    const double s = slope_;

    std::vector<std::size_t> by_lo(pieces_.size());
    std::iota(by_lo.begin(), by_lo.end(), std::size_t{0});
    std::vector<std::size_t> by_hi = by_lo;
    std::sort(by_lo.begin(), by_lo.end(), [&](auto a, auto b) { return pieces_[a].lo < pieces_[b].lo; });
    std::sort(by_hi.begin(), by_hi.end(), [&](auto a, auto b) { return pieces_[a].hi < pieces_[b].hi; });

    // Left arm (x < lo): tents h - s(lo - x), cones h + s(lo - x). Suffix extremum of h -+ s lo.
    std::vector<double> left(pieces_.size() + 1, worst);
    for (std::size_t i = pieces_.size(); i-- > 0;) {
        const Piece& p = pieces_[by_lo[i]];
        left[i] = better(left[i + 1], tents ? p.height - s * p.lo : p.height + s * p.lo);
    }

    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return xs[a] < xs[b]; });

    std::vector<double> out(xs.size());
    std::multiset<double> open;
    double right = worst;  // extremum of h +- s hi over pieces with hi < x
    std::size_t next_lo = 0;
    std::size_t next_hi = 0;
    std::vector<std::multiset<double>::iterator> handle(pieces_.size(), open.end());
    for (std::size_t idx : order) {
        const double x = xs[idx];
        while (next_lo < by_lo.size() && pieces_[by_lo[next_lo]].lo <= x) {
            const std::size_t p = by_lo[next_lo++];
            handle[p] = open.insert(pieces_[p].height);
        }
        while (next_hi < by_hi.size() && pieces_[by_hi[next_hi]].hi < x) {
            const std::size_t p = by_hi[next_hi++];
            right = better(right, tents ? pieces_[p].height + s * pieces_[p].hi : pieces_[p].height - s * pieces_[p].hi);
            if (handle[p] != open.end()) {
                open.erase(handle[p]);
                handle[p] = open.end();
            }
        }
        double v = worst;
        if (!open.empty()) v = better(v, tents ? *open.rbegin() : *open.begin());
        if (right != worst) v = better(v, tents ? right - s * x : right + s * x);
        if (left[next_lo] != worst) v = better(v, tents ? left[next_lo] + s * x : left[next_lo] - s * x);
        out[idx] = tents ? std::max(v, 0.0) : v;
    }
    return out;
}

GridFunction LipschitzEnvelope::sample(int depth) const {
    GridFunction out(1, depth);
    std::vector<double> xs(out.size());
    for (std::size_t c = 0; c < xs.size(); ++c) xs[c] = out.cell_center(c, 0);
    const std::vector<double> v = evaluate(xs);
    std::copy(v.begin(), v.end(), out.values().begin());
    return out;
}

double LipschitzEnvelope::measured_lipschitz(int depth) const {
    const GridFunction v = sample(depth);
    const double h = std::ldexp(1.0, -depth);
    double worst = 0.0;
    for (std::size_t c = 1; c < v.size(); ++c)
        if (std::isfinite(v[c]) && std::isfinite(v[c - 1])) worst = std::max(worst, std::abs(v[c] - v[c - 1]) / h);
    return worst;
}

LipschitzEnvelope tent_envelope(const StoppingFamily& stopping, std::size_t s, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
    std::vector<LipschitzEnvelope::Piece> pieces;
    for (std::size_t c : stopping.children_of(s)) {
        const DyadicCube q = stopping.cube(c);
        pieces.push_back({q.lower(0), q.upper(0), q.side()});
    }
    return {LipschitzEnvelope::Kind::tents, 1.0 / delta, std::move(pieces)};
}

std::vector<std::size_t> sawtooth_cubes(const StoppingFamily& principal, std::size_t p) {
    std::vector<std::size_t> out;
    const Lattice& lat = principal.lattice();
    for (std::size_t q = 0; q < lat.size(); ++q)
        if (principal.owner(q) == static_cast<std::ptrdiff_t>(p)) out.push_back(q);
    return out;
}

namespace {

LipschitzEnvelope infimum_of_cones(const StoppingFamily& principal, std::size_t p, double height_factor,
                                   double width_factor) {
    const Lattice& lat = principal.lattice();
    const int finest = lat.finest_generation();
    std::vector<LipschitzEnvelope::Piece> pieces;
    for (std::size_t q : sawtooth_cubes(principal, p)) {
        const DyadicCube cube = lat.cube(q);
        const double side = cube.side();
        const double half = 0.5 * width_factor * side;
        const double height = cube.j == finest ? 0.0 : height_factor * side;
        pieces.push_back({cube.center(0) - half, cube.center(0) + half, height});
    }
    return {LipschitzEnvelope::Kind::cones, 1.0, std::move(pieces)};
}

}  // namespace

LipschitzEnvelope sawtooth_floor(const StoppingFamily& principal, std::size_t p, double delta) {
    return infimum_of_cones(principal, p, delta, 1.0);
}

LipschitzEnvelope expanded_cone(const DyadicCube& r, double delta_prime, double kappa_prime) {
    const double half = 0.5 * kappa_prime * r.side();
    return {LipschitzEnvelope::Kind::cones,
            1.0,
            {{r.center(0) - half, r.center(0) + half, delta_prime * kappa_prime * r.side()}}};
}

LipschitzEnvelope expanded_floor(const StoppingFamily& principal, std::size_t p, double delta_prime,
                                         double kappa_prime) {
    return infimum_of_cones(principal, p, delta_prime * kappa_prime, kappa_prime);
}

EnvelopeFeatures envelope_features(const StoppingFamily& stopping, std::size_t s, const StoppingFamily& principal,
                                   const WhitneySamples& samples, double delta, double delta_prime,
                                   double kappa_prime) {
    const Lattice& lat = stopping.lattice();
    if (!(lat == principal.lattice()) || !(lat == samples.lattice()))
        throw std::invalid_argument("envelope features need one lattice");
    const int depth = lat.depth();
    const DyadicCube home = stopping.cube(s);
    const std::ptrdiff_t owner = principal.owner(stopping.cube_index(s));
    if (owner == StoppingFamily::none) throw ContractViolation("stopping member outside every principal cube");
    const auto p = static_cast<std::size_t>(owner);

    EnvelopeFeatures out;
    const std::size_t first = cell_of(home.lower(0), depth);
    const std::size_t last = cell_of(home.upper(0), depth);
    const double h = std::ldexp(1.0, -depth);
    std::vector<double> xs;
    for (std::size_t c = first; c < last; ++c) xs.push_back((static_cast<double>(c) + 0.5) * h);
    const std::vector<double> one = tent_envelope(stopping, s, delta).evaluate(xs);
    const std::vector<double> two = sawtooth_floor(principal, p, delta).evaluate(xs);
    out.cells_checked = xs.size();
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (one[i] < two[i]) ++out.order_violations;

    const std::vector<std::size_t> kids = stopping.children_of(s);
    std::vector<DyadicCube> cubes;
    for (std::size_t c : kids) cubes.push_back(stopping.cube(c));
    const UncoveredResult cover = uncovered_filter(home, cubes, delta, 1);
    for (std::size_t a = 0; a < cubes.size(); ++a) {
        const double side = cubes[a].side();
        for (std::size_t c = cell_of(cubes[a].lower(0), depth); c < cell_of(cubes[a].upper(0), depth); ++c) {
            const double v = one[c - first];
            if (v < side) ++out.hidden_violations;
            if (v != side) {
                if (cover.covered[a])
                    ++out.covered_overwritten;
                else
                    ++out.uncovered_violations;
            }
        }
    }

    if (principal.cube_index(p) == stopping.cube_index(s)) {
        std::vector<double> px;
        std::vector<double> pt;
        for (std::size_t q : sawtooth_cubes(principal, p))
            for (const Sample& z : samples.region(q)) {
                px.push_back(z.x);
                pt.push_back(z.t);
            }
        const std::vector<double> lower = sawtooth_floor(principal, p, delta).evaluate(px);
        const std::vector<double> star = expanded_floor(principal, p, delta_prime, kappa_prime).evaluate(px);
        out.samples_checked = px.size();
        for (std::size_t i = 0; i < px.size(); ++i)
            if (!(pt[i] > lower[i]) || !(pt[i] > star[i])) ++out.region_violations;
    }
    return out;
}

}  // namespace bvx::elliptic
