#include "bvx/elliptic/families.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "bvx/errors.hpp"

namespace bvx::elliptic {

bool CorkscrewRule::operator()(std::size_t candidate, std::size_t member) const {
    const double jump = std::abs(samples->corkscrew(candidate).u - samples->corkscrew(member).u);
    return jump > eps * maximal[candidate];
}

StoppingFamily build_principal(const Lattice& lattice, std::span<const double> maximal, double threshold) {
    if (!(threshold > 1.0)) throw ConfigError("principal threshold must be > 1");
    if (maximal.size() != lattice.size()) throw std::invalid_argument("maximal values must be given per lattice cube");
    const std::array<std::size_t, 1> top{0};
    return build_family(lattice, top, PrincipalRule{maximal, threshold});
}

StoppingFamily build_stopping(const WhitneySamples& samples, std::span<const double> maximal,
                              const StoppingFamily& principal, double eps, double eps_internal, double holder) {
    if (!(eps > 0.0) || !(eps_internal > 0.0)) throw ConfigError("eps must be > 0");
    if (!(holder > 0.0 && holder <= 1.0)) throw ConfigError("holder exponent must lie in (0, 1]");
    if (std::pow(samples.eta(), holder) > eps / 10.0 * (1.0 + 1e-12))
        throw ConfigError("eta too large for eps: need eta^alpha <= eps / 10");
    return build_family(samples.lattice(), principal.cube_indices(), CorkscrewRule{&samples, maximal, eps_internal});
}

StoppingFamily build_oscillation(const WhitneySamples& samples, std::span<const double> maximal, double eps) {
    if (!(eps > 0.0)) throw ConfigError("eps must be > 0");
    StoppingFamily out(samples.lattice());
    for (std::size_t i = 0; i < samples.cubes(); ++i)
        if (samples.oscillation(i) > eps * maximal[i]) out.insert(i);
    return out;
}

std::size_t owner_rule_violations(const StoppingFamily& family, const StopRule& rule) {
    std::size_t bad = 0;
    const Lattice& lat = family.lattice();
    for (std::size_t q = 0; q < lat.size(); ++q) {
        const std::ptrdiff_t f = family.owner(q);
        if (f == StoppingFamily::none) continue;
        const std::size_t cube = family.cube_index(static_cast<std::size_t>(f));
        if (cube != q && rule(q, cube)) ++bad;
    }
    return bad;
}

SparseCertificate sparse_certificate(const StoppingFamily& principal, double threshold) {
    SparseCertificate out;
    out.ratio.assign(principal.size(), 0.0);
    for (std::size_t i = 0; i < principal.size(); ++i) {
        const std::size_t p = principal.parent(i);
        if (p == i) continue;
        out.ratio[p] += principal.cube(i).volume();
    }
    for (std::size_t i = 0; i < principal.size(); ++i) {
        out.ratio[i] *= threshold / principal.cube(i).volume();
        if (out.ratio[i] > 1.0 + 1e-12) ++out.violations;
        out.worst = std::max(out.worst, out.ratio[i]);
    }
    return out;
}

CorkscrewJumpResult corkscrew_jump_check(const WhitneySamples& samples, std::span<const double> maximal,
                            const StoppingFamily& stopping, const StoppingFamily& principal, double eps_internal) {
    CorkscrewJumpResult out;
    out.min_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < stopping.size(); ++i) {
        const std::size_t q = stopping.cube_index(i);
        if (principal.contains(q) || stopping.parent(i) == i) continue;
        const std::size_t f = stopping.cube_index(stopping.parent(i));
        const double ref = samples.corkscrew(f).u;
        double low = std::numeric_limits<double>::infinity();
        for (const Sample& s : samples.top(q)) low = std::min(low, std::abs(s.u - ref));
        ++out.fired;
        out.min_ratio = std::min(out.min_ratio, low / (eps_internal * maximal[q]));
    }
    if (out.fired == 0) out.min_ratio = 0.0;
    return out;
}

UncoveredResult uncovered_filter(const DyadicCube& q, std::span<const DyadicCube> members, double delta, int margin,
                                 int centred_multiple) {
    if (!(delta > 0.0 && delta < 0.5)) throw ConfigError("delta must lie in (0, 1/2)");
    if (margin < 1 || centred_multiple < 1) throw ConfigError("margins must be >= 1");
    for (std::size_t a = 0; a < members.size(); ++a) {
        if (members[a].n != q.n || !q.contains(members[a]) || members[a].j <= q.j)
            throw ConfigError("uncovered filter: members must be strict subcubes of Q");
        for (std::size_t b = a + 1; b < members.size(); ++b)
            if (members[a].contains(members[b]) || members[b].contains(members[a]))
                throw ConfigError("uncovered filter: members must be pairwise disjoint");
    }
    const std::size_t count = members.size();
    UncoveredResult out;
    out.centred.assign(count, 0);
    out.covered.assign(count, 0);
    out.chains.resize(count);
    // best_cover[a]: the largest cube covering member a, nearest on ties.
    std::vector<std::ptrdiff_t> best_cover(count, -1);
    for (std::size_t a = 0; a < count; ++a) {
        out.centred[a] = inside_shrunk(members[a], q, centred_multiple * delta) ? 1 : 0;
        double best_side = 0.0;
        double best_dist = 0.0;
        for (std::size_t b = 0; b < count; ++b) {
            if (b == a) continue;
            const double d = distance(members[a], members[b]);
            if (!(members[b].side() - d / delta > members[a].side())) continue;
            out.covered[a] = 1;
            const double s = members[b].side();
            if (best_cover[a] < 0 || s > best_side || (s == best_side && d < best_dist)) {
                best_cover[a] = static_cast<std::ptrdiff_t>(b);
                best_side = s;
                best_dist = d;
            }
        }
    }
    for (std::size_t a = 0; a < count; ++a) {
        std::vector<std::size_t>& chain = out.chains[a];
        chain.push_back(a);
        while (best_cover[chain.back()] >= 0) {
            const auto next = static_cast<std::size_t>(best_cover[chain.back()]);
            if (!(members[next].side() > members[chain.back()].side()))
                throw ContractViolation("covering chain did not increase in side length");
            chain.push_back(next);
        }
        if (out.centred[a] && !out.covered[a]) out.selected.push_back(a);
        out.lhs += members[a].volume();
    }
    out.tau = 1.0 - std::pow(std::max(0.0, 1.0 - 2.0 * margin * delta), q.n);
    out.constant = std::pow(5.0, q.n);
    double selected = 0.0;
    for (std::size_t a : out.selected) selected += members[a].volume();
    out.rhs = out.tau * q.volume() + out.constant * selected;
    return out;
}

}  // namespace bvx::elliptic
