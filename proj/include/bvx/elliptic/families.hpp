#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bvx/dyadic.hpp"
#include "bvx/elliptic/samples.hpp"
#include "bvx/stopping.hpp"

namespace bvx::elliptic {

/// Stops at Q' under Q when M(Q') > threshold * M(Q); M given per lattice cube.
struct PrincipalRule {
    std::span<const double> maximal;
    double threshold;
    [[nodiscard]] bool operator()(std::size_t candidate, std::size_t member) const {
        return maximal[candidate] > threshold * maximal[member];
    }
};

/// Stops at Q' under Q when |u(p_Q') - u(p_Q)| > eps * M(Q').
struct CorkscrewRule {
    const WhitneySamples* samples;
    std::span<const double> maximal;
    double eps;
    [[nodiscard]] bool operator()(std::size_t candidate, std::size_t member) const;
};

/// Initial collection {top cube}; requires threshold > 1.
[[nodiscard]] StoppingFamily build_principal(const Lattice& lattice, std::span<const double> maximal, double threshold);

/// Initial collection P with the corkscrew rule. Requires eta^holder <= eps / 10,
/// where `eps` is the advertised accuracy and `eps_internal` drives the rule.
[[nodiscard]] StoppingFamily build_stopping(const WhitneySamples& samples, std::span<const double> maximal,
                                            const StoppingFamily& principal, double eps, double eps_internal,
                                            double holder);

/// All cubes whose sampled oscillation exceeds eps * M(R).
[[nodiscard]] StoppingFamily build_oscillation(const WhitneySamples& samples, std::span<const double> maximal,
                                               double eps);

/// Number of lattice cubes Q with owner F != Q for which rule(Q, F) holds;
/// zero for any family built from that rule.
[[nodiscard]] std::size_t owner_rule_violations(const StoppingFamily& family, const StopRule& rule);

struct SparseCertificate {
    std::vector<double> ratio;  // per member: threshold * sum |children| / |Q|, at most 1
    std::size_t violations = 0;
    double worst = 0.0;
};
[[nodiscard]] SparseCertificate sparse_certificate(const StoppingFamily& principal, double threshold);

struct CorkscrewJumpResult {
    std::size_t fired = 0;      // members of S outside P
    double min_ratio = 0.0;     // min over them of min_{Q~'} |u(z) - u(p_F)| / (eps M(Q'))
};
[[nodiscard]] CorkscrewJumpResult corkscrew_jump_check(const WhitneySamples& samples, std::span<const double> maximal,
                                          const StoppingFamily& stopping, const StoppingFamily& principal,
                                          double eps_internal);

struct UncoveredResult {
    std::vector<std::size_t> selected;  // indices into the input: centred and uncovered
    std::vector<char> centred;
    std::vector<char> covered;
    /// Per input cube: itself, then successive largest coverers, ending at an
    /// uncovered cube. Side lengths strictly increase along a chain.
    std::vector<std::vector<std::size_t>> chains;
    double lhs = 0.0;       // sum of |Q'| over the input
    double tau = 0.0;       // 1 - (1 - 2 m delta)^n
    double constant = 0.0;  // 5^n
    double rhs = 0.0;       // tau |Q| + constant * sum over selected |Q''|
    [[nodiscard]] bool holds() const { return lhs <= rhs * (1.0 + 1e-12); }
};

/// Centred means inside (1 - 2 c delta) Q with c = `centred_multiple`; the
/// volume inequality uses the margin m delta of the dichotomy. Requires the
/// members to be pairwise disjoint strict subcubes of q; throws ConfigError.
[[nodiscard]] UncoveredResult uncovered_filter(const DyadicCube& q, std::span<const DyadicCube> members, double delta,
                                               int margin, int centred_multiple = 1);

}  // namespace bvx::elliptic
